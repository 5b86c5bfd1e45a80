#include <iostream>

#include "CLI11.hpp"
#include "accel/errors.hpp"
#include "accel/harness.hpp"

namespace accel {

int cli_main(int argc, char **argv) {
  CLI::App app{"Accelerated optimization on the sphere and Stiefel manifold"};
  app.require_subcommand(1);
  app.fallthrough();

  CommandOptions options;
  std::string output_dir;
  long record_every = 0;
  app.add_option("--output-dir", output_dir, "Directory for CSV outputs (overrides config)");
  app.add_option("--record-every", record_every, "Record every N-th iteration (overrides config)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", options.quiet, "Suppress progress output");

  std::string config_path;
  auto *run_cmd = app.add_subcommand("run", "Run every configured method, one trace per method");
  run_cmd->add_option("config", config_path, "JSON experiment config")->required();

  auto *compare_cmd = app.add_subcommand("compare", "Run methods and align their errors by iteration");
  compare_cmd->add_option("config", config_path, "JSON experiment config")->required();

  std::string param;
  std::vector<double> values;
  auto *sweep_cmd = app.add_subcommand("sweep", "Rerun the config over a list of parameter values");
  sweep_cmd->add_option("config", config_path, "JSON experiment config")->required();
  sweep_cmd->add_option("--param", param, "p, h or p_ring")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }
  if (!output_dir.empty()) options.output_dir = output_dir;
  if (record_every > 0) options.record_every = record_every;

  try {
    const ExperimentConfig config = load_config(config_path);
    if (run_cmd->parsed()) {
      cmd_run(config, options);
    } else if (compare_cmd->parsed()) {
      cmd_compare(config, options);
    } else if (sweep_cmd->parsed()) {
      cmd_sweep(config, parse_sweep_param(param), values, options);
    }
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::IOFailure ? 3 : 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace accel
