#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "accel/manifold.hpp"
#include "accel/matops.hpp"

namespace accel {

/// f(x) = -x^T A x on the sphere; minimized by a top eigenvector of A.
struct Rayleigh {
  Matrix A;
};

/// f(X) = Trace(X^T A X N) on St(m, n), N = diag(mu), 0 <= mu_1 <= ... <= mu_m.
struct Brockett {
  Matrix A;
  Vector mu;
};

/// f(X) = ||A X - B||_F^2 on St(m, n), A is l x n, B is l x m.
struct Procrustes {
  Matrix A;
  Matrix B;
  /// Exact minimizer when known by construction (noise-free generator).
  std::optional<Matrix> planted;
};

struct Oracle {
  double f_star = 0.0;
  std::optional<Matrix> X_star;
  std::string method;
};

/// Options for the numerical Procrustes oracle.
struct ReferenceOptions {
  int iterations = 100000;
  int restarts = 4;
  std::uint64_t seed = 0;
};

class Problem {
 public:
  using Variant = std::variant<Rayleigh, Brockett, Procrustes>;

  /// Validates the instance (symmetry, N ordering, Procrustes shapes).
  explicit Problem(Variant instance);

  const Variant &instance() const { return instance_; }
  std::string_view name() const;

  /// Point shape: n x 1 for Rayleigh, n x m otherwise.
  Eigen::Index rows() const;
  Eigen::Index cols() const;

  /// Sphere{n} for Rayleigh, Stiefel{n, m} (polar/polar) otherwise.
  ManifoldSpec default_manifold() const;

  double value(const Matrix &X) const;
  Matrix euclidean_grad(const Matrix &X) const;
  Matrix riemannian_grad(const ManifoldSpec &M, const Matrix &X) const;

  /// Optimal value (and minimizer when available). Rayleigh and Brockett
  /// use an eigendecomposition, balanced Procrustes the polar factor of A^T B,
  /// planted Procrustes the construction, anything else a long reference
  /// gradient descent tagged "numerical".
  Oracle oracle(const ReferenceOptions &reference = {}) const;

 private:
  void require_point_shape(const Matrix &X, const char *what) const;

  Variant instance_;
};

/// Trace(diag(lambda_perm) diag(mu)) minimized over all orderings of the
/// eigenvalues; returns the optimal assignment column -> eigenvalue index.
/// Exhaustive; intended for small m.
std::vector<int> brockett_pairing_bruteforce(const Vector &lambda_smallest, const Vector &mu);

/// Log-spaced spectrum from 1 to kappa with n entries.
std::vector<double> log_spaced_spectrum(Eigen::Index n, double kappa);

/// Q diag(spectrum) Q^T with Q = qf of a seeded Gaussian.
Matrix gen_symmetric(Eigen::Index n, const std::vector<double> &spectrum, std::uint64_t seed);

struct ProcrustesData {
  Matrix A;
  Matrix B;
  Matrix X0;
};

/// A Gaussian l x n, B = A X0 + noise * Gaussian with X0 a seeded Stiefel point.
ProcrustesData gen_procrustes(Eigen::Index l, Eigen::Index n, Eigen::Index m, std::uint64_t seed,
                              double noise = 0.0);

}  // namespace accel
