#include <chrono>
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "paramred/errors.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  paramred::tools::CliFlags flags;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config, "JSON config file")->required();
  cmd->add_option("--out", opt.out, "Output directory")->required();
  cmd->add_option("--seed", opt.flags.seed, "Seed for randomized audits");
  cmd->add_flag("--weights", opt.flags.weight_column,
                "Treat the final parameter-CSV column as weights");
  cmd->add_flag("--probability", opt.flags.probability,
                "Normalise weights to a probability measure");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "paramred: snapshot-based analysis and reduction of parametric "
      "models (correlation/kernel factorizations, POD, structure-preserving "
      "encodings, coupled systems, tensor trains)"};
  app.require_subcommand(1);

  CommonOptions simulate_opt, pod_opt, coupled_opt, tensor_opt, field_opt;
  add_common(app.add_subcommand("simulate",
                                "Generate piston snapshot ensembles"),
             simulate_opt);
  add_common(app.add_subcommand("pod", "Karhunen-Loeve / POD analysis"),
             pod_opt);
  add_common(app.add_subcommand("coupled", "Coupled two-subsystem analysis"),
             coupled_opt);
  add_common(app.add_subcommand("tensor", "Snapshot tensor TT-SVD"),
             tensor_opt);
  add_common(app.add_subcommand("matrix-field",
                                "Manifold-valued field encode/POD/decode"),
             field_opt);

  CLI11_PARSE(app, argc, argv);

  const auto started = std::chrono::steady_clock::now();
  int code = 2;
  try {
    if (app.got_subcommand("simulate"))
      code = paramred::tools::cmd_simulate(simulate_opt.config,
                                           simulate_opt.out, simulate_opt.flags);
    else if (app.got_subcommand("pod"))
      code = paramred::tools::cmd_pod(pod_opt.config, pod_opt.out,
                                      pod_opt.flags);
    else if (app.got_subcommand("coupled"))
      code = paramred::tools::cmd_coupled(coupled_opt.config, coupled_opt.out,
                                          coupled_opt.flags);
    else if (app.got_subcommand("tensor"))
      code = paramred::tools::cmd_tensor(tensor_opt.config, tensor_opt.out,
                                         tensor_opt.flags);
    else if (app.got_subcommand("matrix-field"))
      code = paramred::tools::cmd_matrix_field(field_opt.config, field_opt.out,
                                               field_opt.flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - started;
  // Timing goes to stdout only; report files must be byte-identical
  // across reruns.
  std::cout << "elapsed_seconds: " << elapsed.count() << "\n";
  return code;
}
