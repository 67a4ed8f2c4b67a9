#ifndef PARAMRED_TOOLS_COMMANDS_HPP
#define PARAMRED_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <filesystem>

namespace paramred::tools {

// Command-line switches that override the JSON config.
struct CliFlags {
  bool weight_column = false;    // treat the params CSV's last column as weights
  bool probability = false;      // normalise weights to a probability measure
  std::uint64_t seed = 0;        // seed for randomized audits
};

// Each command reads its JSON config (paths inside are resolved relative
// to the config file), writes its outputs plus <out>/report.json, and
// returns 0 exactly when every invariant audit in the report passed.
// Failures to parse or compute throw; main() maps those to exit code 2.

int cmd_simulate(const std::filesystem::path& config_path,
                 const std::filesystem::path& out_dir, const CliFlags& flags);
int cmd_pod(const std::filesystem::path& config_path,
            const std::filesystem::path& out_dir, const CliFlags& flags);
int cmd_coupled(const std::filesystem::path& config_path,
                const std::filesystem::path& out_dir, const CliFlags& flags);
int cmd_tensor(const std::filesystem::path& config_path,
               const std::filesystem::path& out_dir, const CliFlags& flags);
int cmd_matrix_field(const std::filesystem::path& config_path,
                     const std::filesystem::path& out_dir,
                     const CliFlags& flags);

}  // namespace paramred::tools

#endif  // PARAMRED_TOOLS_COMMANDS_HPP
