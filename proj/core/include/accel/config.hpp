#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "accel/integrators.hpp"
#include "accel/manifold.hpp"
#include "accel/problems.hpp"

namespace accel {

/// Problem instance: either generated from a seed or loaded from CSV files.
struct ProblemConfig {
  std::string kind;  // "rayleigh" | "brockett" | "procrustes"
  long n = 0;
  long m = 1;
  long l = 0;
  std::uint64_t seed = 1;
  /// Generated spectra are log-spaced on [1, condition_number], times scale.
  double condition_number = 1e3;
  double spectrum_scale = 1.0;
  std::optional<std::vector<double>> spectrum;
  std::vector<double> mu;  // Brockett N = diag(mu)
  double noise = 0.0;      // Procrustes
  std::optional<std::filesystem::path> a_file;
  std::optional<std::filesystem::path> b_file;
};

struct ManifoldConfig {
  std::optional<PointProjection> projection;
  std::optional<RetractionMethod> retraction;
  int series_order = 3;
};

struct MethodConfig {
  std::string label;
  Method method = Method::RGD;
  BregmanParams params;
  std::optional<long> record_every;
};

struct InitConfig {
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> file;
};

enum class OracleMode { Auto, None };

struct ExperimentConfig {
  ProblemConfig problem;
  ManifoldConfig manifold;
  std::vector<MethodConfig> methods;
  StopCriteria stop;
  long record_every = 1;
  InitConfig init;
  OracleMode oracle = OracleMode::Auto;
  /// Multiplier on max_iter for the numerical Procrustes reference run.
  long reference_factor = 10;
  /// Tolerance for iterations-to-tolerance when stop.f_tol is absent.
  double summary_tol = 1e-8;
  std::filesystem::path output_dir = "results";
};

/// Parses a JSON config; relative file paths resolve against base_dir.
/// Throws ConfigInvalid naming the offending key.
ExperimentConfig parse_config(const std::string &json_text,
                              const std::filesystem::path &base_dir = ".");

/// Reads and parses a config file. Throws IOFailure if it cannot be read.
ExperimentConfig load_config(const std::filesystem::path &path);

/// Problem, manifold, starting point and oracle built from a config.
struct Experiment {
  Problem problem;
  ManifoldSpec manifold;
  Matrix x0;
  std::optional<Oracle> oracle;
};

Experiment build_experiment(const ExperimentConfig &config);

PointProjection parse_projection(const std::string &name);
RetractionMethod parse_retraction(const std::string &name);

}  // namespace accel
