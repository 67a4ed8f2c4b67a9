#include "paramred/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "paramred/errors.hpp"

namespace paramred {

namespace {

double parse_field(const std::string& field, std::size_t line_no) {
  const char* begin = field.c_str();
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(begin, &end);
  // Allow surrounding whitespace, nothing else.
  while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end)))
    ++end;
  if (end == begin || (end && *end != '\0') || errno == ERANGE) {
    throw InputError("csv: line " + std::to_string(line_no) +
                     ": cannot parse '" + field + "' as a number");
  }
  return value;
}

}  // namespace

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Skip blank lines (commonly a trailing newline).
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      row.push_back(parse_field(field, line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError("csv: line " + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) +
                       " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("csv: " + path.string() + " is empty");
  return rows;
}

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

void write_csv_matrix(const std::filesystem::path& path,
                      const Eigen::MatrixXd& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 25);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_number(m(i, j));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open file for writing: " + tmp.string());
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace paramred
