#ifndef PARAMRED_CSV_HPP
#define PARAMRED_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace paramred {

/// Reads a headerless CSV of 64-bit floats. Every row must have the same
/// number of columns. Parse failures and ragged rows raise InputError with
/// the 1-based line number.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path);

/// Reads a CSV straight into a dense matrix (rows x cols).
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);

/// Writes a matrix as CSV with %.16e formatting (17 significant digits,
/// scientific). The file is written to a temporary and renamed into place.
void write_csv_matrix(const std::filesystem::path& path,
                      const Eigen::MatrixXd& m);

/// Formats a double as fixed 17-significant-digit scientific notation.
/// All numeric CLI output goes through this so reruns are byte-identical.
std::string format_number(double x);

/// Atomically replaces `path` with `content` (temp file + rename).
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace paramred

#endif  // PARAMRED_CSV_HPP
