#pragma once

#include <cstdint>
#include <string_view>

#include "accel/matops.hpp"

namespace accel {

enum class ManifoldKind { Sphere, Stiefel };

/// How an arbitrary ambient matrix is mapped onto the manifold.
enum class PointProjection {
  Normalize,    // sphere: y / ||y||
  Polar,        // Stiefel: U V^T
  QF,           // Stiefel: Q factor of the positive-diagonal QR
  PolarSeries,  // Stiefel: truncated series of Y (Y^T Y)^{-1/2}
};

enum class RetractionMethod {
  Exponential,          // sphere geodesic
  ProjectiveNormalize,  // sphere: (x + v) / ||x + v||
  Polar,                // Stiefel: (X + xi)(I + xi^T xi)^{-1/2}
  QF,                   // Stiefel: qf(X + xi)
};

std::string_view to_string(PointProjection p);
std::string_view to_string(RetractionMethod r);

/// Unit sphere S^{n-1} (points are n x 1) or Stiefel St(m, n) (points are
/// n x m with orthonormal columns), plus the projection/retraction choices.
struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Sphere;
  Eigen::Index n = 2;
  Eigen::Index m = 1;
  PointProjection projection = PointProjection::Normalize;
  RetractionMethod retraction = RetractionMethod::Exponential;
  int series_order = 3;

  static ManifoldSpec sphere(Eigen::Index n,
                             RetractionMethod retraction = RetractionMethod::Exponential);
  static ManifoldSpec stiefel(Eigen::Index n, Eigen::Index m,
                              PointProjection projection = PointProjection::Polar,
                              RetractionMethod retraction = RetractionMethod::Polar,
                              int series_order = 3);

  /// Throws InvalidParams on inconsistent dimensions or method choices.
  void validate() const;

  Eigen::Index rows() const { return n; }
  Eigen::Index cols() const { return kind == ManifoldKind::Sphere ? 1 : m; }
};

/// Frobenius inner product.
inline double inner(const Matrix &A, const Matrix &B) { return (A.array() * B.array()).sum(); }

Matrix project_point(const ManifoldSpec &M, const Matrix &Y);

/// Orthogonal projection onto T_X: Z - (x^T Z) x on the sphere and
/// Z - X sym(X^T Z) on Stiefel.
Matrix project_tangent(const ManifoldSpec &M, const Matrix &X, const Matrix &Z);

/// R_X(xi). Returns X unchanged when xi is exactly zero.
Matrix retract(const ManifoldSpec &M, const Matrix &X, const Matrix &xi);

/// Moves w in T_X to T_Y. Exact parallel transport along the minimal geodesic
/// for the sphere with the exponential retraction, projection otherwise.
Matrix transport(const ManifoldSpec &M, const Matrix &X, const Matrix &Y, const Matrix &w);

/// Riemannian gradient of the restriction of a function with Euclidean
/// gradient g_euclid.
Matrix riemannian_grad(const ManifoldSpec &M, const Matrix &X, const Matrix &g_euclid);

/// |‖y‖ - 1| on the sphere, ‖Y^T Y - I‖_F on Stiefel.
double constraint_violation(const ManifoldSpec &M, const Matrix &Y);

/// Seeded point, deterministic in seed.
Matrix random_point(const ManifoldSpec &M, std::uint64_t seed);

/// Seeded tangent at X with Frobenius norm `norm` (0 gives the zero tangent).
Matrix random_tangent(const ManifoldSpec &M, const Matrix &X, std::uint64_t seed, double norm);

/// Standard-normal ambient matrix, deterministic in seed.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

// Sphere geodesics. Both use a Taylor expansion for ‖v‖ < 1e-8.
Matrix sphere_exp(const Matrix &x, const Matrix &v);
Matrix sphere_log(const Matrix &x, const Matrix &y);

}  // namespace accel
