#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "accel/manifold.hpp"
#include "accel/problems.hpp"

namespace accel {

enum class Method { ELI, ELII, HTVIDirect, HTVIAdaptive, RGD };

std::string_view to_string(Method method);
/// Accepts "EL-I", "EL-II", "HTVI-Direct", "HTVI-Adaptive", "RGD".
std::optional<Method> parse_method(std::string_view name);

/// Parameters of the p-Bregman dynamics and of their discretizations.
struct BregmanParams {
  double p = 4.0;
  double p_ring = 4.0;  // ignored by HTVI-Direct, which uses p_ring = p
  double C = 1.0;
  double zeta = 1.0;
  double lambda = 1.0;
  double h = 0.01;
  double q_frak_0 = 1.0;
  /// Upper bound on the growing gradient coefficient; +inf disables it.
  double c_max = 1e8;
  bool project_momentum = false;

  /// Throws InvalidParams naming the offending field.
  void validate(Method method) const;
};

struct ELState {
  long k = 1;
  Matrix X;
  Matrix V;
};

/// q_frak is the time variable. Its conjugate momentum does not enter the
/// position/momentum updates and is not tracked.
struct HTVIState {
  long k = 0;
  Matrix q;
  Matrix r;
  double q_frak = 1.0;
};

enum class ELVersion { I, II };

/// One semi-implicit Euler-Lagrange step. Version II evaluates the gradient
/// at R_X(h b_k V) and projects it back onto T_X before mixing.
ELState el_step(const ELState &s, const Problem &P, const ManifoldSpec &M,
                const BregmanParams &params, ELVersion version);

/// One projected HTVI step (Adaptive; Direct is p_ring = p).
HTVIState htvi_step(const HTVIState &s, const Problem &P, const ManifoldSpec &M,
                    const BregmanParams &params);

/// X <- R_X(-h grad f(X)).
Matrix rgd_step(const Matrix &X, const Problem &P, const ManifoldSpec &M, double h);

// Scalar coefficients, exposed for tests.
double el_momentum_factor(const BregmanParams &params, long k);
double el_gradient_coefficient(const BregmanParams &params, long k);
double htvi_gradient_coefficient(const BregmanParams &params, double q_frak);
double htvi_position_coefficient(const BregmanParams &params, double q_frak);
double htvi_time_increment(const BregmanParams &params, double q_frak);

struct StopCriteria {
  long max_iter = 1000;
  std::optional<double> f_tol;
  std::optional<double> grad_tol;

  void validate() const;
};

struct TraceRecord {
  long k = 0;
  double t = 0.0;
  double f_value = 0.0;
  std::optional<double> error;
  double constraint_violation = 0.0;
  double grad_norm = 0.0;
};

enum class Termination { MaxIterations, Converged, GradientTolerance, Diverged, Failed };

std::string_view to_string(Termination reason);

using InitialState = std::variant<ELState, HTVIState, Matrix>;

/// Zero-velocity / zero-momentum start at X0 appropriate for the method.
InitialState initial_state(Method method, const Matrix &X0, const BregmanParams &params);

struct RunResult {
  std::vector<TraceRecord> trace;
  Termination reason = Termination::MaxIterations;
  std::string message;
  long iterations = 0;
  /// Measurements at the last valid iterate (the initial point if no step ran).
  TraceRecord final;
};

/// Iterates the method until max_iter, f - f_star <= f_tol, ‖grad‖ <= grad_tol
/// or a step fails. Records every record_every-th iteration and the final one.
/// Step errors end the run with a partial trace; they are never rethrown.
RunResult run(Method method, const Problem &P, const ManifoldSpec &M, const BregmanParams &params,
              const InitialState &init, const StopCriteria &stop, long record_every = 1,
              std::optional<double> f_star = std::nullopt);

}  // namespace accel
