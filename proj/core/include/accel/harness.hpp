#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "accel/config.hpp"
#include "accel/integrators.hpp"

namespace accel {

/// Command-line overrides shared by all commands.
struct CommandOptions {
  std::optional<std::filesystem::path> output_dir;
  std::optional<long> record_every;
  bool quiet = false;
  std::ostream *log = nullptr;  // progress lines; nullptr means std::cout
};

struct RunSummary {
  std::string method;
  long iterations = 0;
  double final_f = 0.0;
  std::optional<double> final_error;
  /// First recorded k with error <= tolerance.
  std::optional<long> iterations_to_tolerance;
  Termination reason = Termination::MaxIterations;
  std::string message;
  double wall_seconds = 0.0;  // reported on the log only, never written to CSV
};

struct MethodRun {
  MethodConfig config;
  RunResult result;
  RunSummary summary;
};

std::optional<long> iterations_to_tolerance(const std::vector<TraceRecord> &trace, double tol);

/// Runs every configured method from the shared starting point.
std::vector<MethodRun> run_methods(const ExperimentConfig &config, const Experiment &experiment,
                                   const CommandOptions &options);

/// File-name-safe version of a method label.
std::string sanitize_label(const std::string &label);

/// `method,iterations,final_f,final_error,iterations_to_tolerance,termination`
std::string summary_csv(const std::vector<RunSummary> &rows);

/// Wide table `k,t_<label>,error_<label>,...` aligned on k.
std::string compare_csv(const std::vector<MethodRun> &runs);

/// Writes trace_<label>.csv per method and summary.csv.
std::vector<RunSummary> cmd_run(const ExperimentConfig &config, const CommandOptions &options);

/// Writes compare.csv and summary.csv. Requires >= 2 methods sharing one
/// record grid.
std::vector<RunSummary> cmd_compare(const ExperimentConfig &config, const CommandOptions &options);

enum class SweepParam { P, H, PRing };

SweepParam parse_sweep_param(const std::string &name);
std::string_view to_string(SweepParam param);

struct SweepRow {
  double value = 0.0;
  RunSummary summary;
};

/// Reruns the config once per value, writing sweep_<label>_<param>_<value>.csv
/// and sweep_summary.csv ranked by iterations-to-tolerance.
std::vector<SweepRow> cmd_sweep(const ExperimentConfig &config, SweepParam param,
                                const std::vector<double> &values, const CommandOptions &options);

/// Entry point shared by the CLI and tests; returns the process exit code.
int cli_main(int argc, char **argv);

}  // namespace accel
