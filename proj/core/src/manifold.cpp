#include "accel/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "accel/errors.hpp"

namespace accel {

namespace {

constexpr double kTaylorThreshold = 1e-8;
constexpr double kAntipodalTol = 1e-8;
constexpr int kMaxRedraws = 16;

void require_shape(const ManifoldSpec &M, const Matrix &Y, const char *what) {
  if (Y.rows() != M.rows() || Y.cols() != M.cols()) {
    throw Error(ErrorKind::ShapeMismatch,
                std::string(what) + ": expected " + std::to_string(M.rows()) + "x" +
                    std::to_string(M.cols()) + ", got " + std::to_string(Y.rows()) + "x" +
                    std::to_string(Y.cols()));
  }
}

Matrix normalize(const Matrix &y, const char *what) {
  require_finite(y, what);
  const double nrm = y.stableNorm();
  if (!(nrm > 0.0)) {
    throw Error(ErrorKind::DegenerateInput, std::string(what) + ": cannot normalize zero vector");
  }
  return y / nrm;
}

Matrix stiefel_project(const ManifoldSpec &M, const Matrix &Y, PointProjection method) {
  try {
    switch (method) {
      case PointProjection::Polar: return polar_factor(Y);
      case PointProjection::QF: return qf(Y);
      case PointProjection::PolarSeries: return polar_factor_series(Y, M.series_order);
      case PointProjection::Normalize: break;
    }
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::RankDeficient) {
      throw Error(ErrorKind::DegenerateInput, std::string("project_point: ") + e.what());
    }
    throw;
  }
  throw Error(ErrorKind::InvalidParams, "project_point: Normalize is a sphere projection");
}

}  // namespace

std::string_view to_string(PointProjection p) {
  switch (p) {
    case PointProjection::Normalize: return "normalize";
    case PointProjection::Polar: return "polar";
    case PointProjection::QF: return "qf";
    case PointProjection::PolarSeries: return "polar_series";
  }
  return "unknown";
}

std::string_view to_string(RetractionMethod r) {
  switch (r) {
    case RetractionMethod::Exponential: return "exponential";
    case RetractionMethod::ProjectiveNormalize: return "projective";
    case RetractionMethod::Polar: return "polar";
    case RetractionMethod::QF: return "qf";
  }
  return "unknown";
}

ManifoldSpec ManifoldSpec::sphere(Eigen::Index n, RetractionMethod retraction) {
  ManifoldSpec M;
  M.kind = ManifoldKind::Sphere;
  M.n = n;
  M.m = 1;
  M.projection = PointProjection::Normalize;
  M.retraction = retraction;
  M.validate();
  return M;
}

ManifoldSpec ManifoldSpec::stiefel(Eigen::Index n, Eigen::Index m, PointProjection projection,
                                   RetractionMethod retraction, int series_order) {
  ManifoldSpec M;
  M.kind = ManifoldKind::Stiefel;
  M.n = n;
  M.m = m;
  M.projection = projection;
  M.retraction = retraction;
  M.series_order = series_order;
  M.validate();
  return M;
}

void ManifoldSpec::validate() const {
  if (kind == ManifoldKind::Sphere) {
    if (n < 2) throw Error(ErrorKind::InvalidParams, "sphere: ambient dimension must be >= 2");
    if (projection != PointProjection::Normalize) {
      throw Error(ErrorKind::InvalidParams, "sphere: point projection must be normalize");
    }
    if (retraction != RetractionMethod::Exponential &&
        retraction != RetractionMethod::ProjectiveNormalize) {
      throw Error(ErrorKind::InvalidParams,
                  "sphere: retraction must be exponential or projective");
    }
    return;
  }
  if (m < 1 || n < m) throw Error(ErrorKind::InvalidParams, "stiefel: requires n >= m >= 1");
  if (projection == PointProjection::Normalize) {
    throw Error(ErrorKind::InvalidParams, "stiefel: point projection must be polar, qf or polar_series");
  }
  if (retraction != RetractionMethod::Polar && retraction != RetractionMethod::QF) {
    throw Error(ErrorKind::InvalidParams, "stiefel: retraction must be polar or qf");
  }
  if (series_order < 1 || series_order > 3) {
    throw Error(ErrorKind::InvalidParams, "stiefel: series order must be 1, 2 or 3");
  }
}

Matrix project_point(const ManifoldSpec &M, const Matrix &Y) {
  require_shape(M, Y, "project_point");
  require_finite(Y, "project_point");
  if (M.kind == ManifoldKind::Sphere) return normalize(Y, "project_point");
  return stiefel_project(M, Y, M.projection);
}

Matrix project_tangent(const ManifoldSpec &M, const Matrix &X, const Matrix &Z) {
  require_shape(M, X, "project_tangent");
  require_shape(M, Z, "project_tangent");
  if (M.kind == ManifoldKind::Sphere) {
    return Z - inner(X, Z) * X;
  }
  const Matrix XtZ = X.transpose() * Z;
  return Z - 0.5 * X * (XtZ + XtZ.transpose());
}

Matrix sphere_exp(const Matrix &x, const Matrix &v) {
  const double theta = v.norm();
  double c, s;  // cos(theta), sin(theta) / theta
  if (theta < kTaylorThreshold) {
    c = 1.0 - 0.5 * theta * theta;
    s = 1.0 - theta * theta / 6.0;
  } else {
    c = std::cos(theta);
    s = std::sin(theta) / theta;
  }
  return c * x + s * v;
}

Matrix sphere_log(const Matrix &x, const Matrix &y) {
  const double c = std::clamp(inner(x, y), -1.0, 1.0);
  const Matrix r = y - c * x;
  const double sin_theta = r.norm();
  if ((x + y).norm() < kAntipodalTol) {
    throw Error(ErrorKind::AntipodalPoints, "sphere_log: points are antipodal");
  }
  const double theta = std::atan2(sin_theta, c);
  if (theta < kTaylorThreshold) return r;
  return (theta / sin_theta) * r;
}

Matrix retract(const ManifoldSpec &M, const Matrix &X, const Matrix &xi) {
  require_shape(M, X, "retract");
  require_shape(M, xi, "retract");
  require_finite(xi, "retract");
  if ((xi.array() == 0.0).all()) return X;

  switch (M.retraction) {
    case RetractionMethod::Exponential:
      // Renormalize so that rounding in the tangent does not accumulate.
      return normalize(sphere_exp(X, xi), "retract");
    case RetractionMethod::ProjectiveNormalize:
      return normalize(X + xi, "retract");
    case RetractionMethod::Polar:
      // For tangent xi, (X + xi)^T (X + xi) = I + xi^T xi, so this is the
      // polar factor of X + xi.
      return polar_factor(X + xi);
    case RetractionMethod::QF:
      return qf(X + xi);
  }
  throw Error(ErrorKind::InvalidParams, "retract: unknown retraction");
}

Matrix transport(const ManifoldSpec &M, const Matrix &X, const Matrix &Y, const Matrix &w) {
  require_shape(M, X, "transport");
  require_shape(M, Y, "transport");
  require_shape(M, w, "transport");
  if (M.kind == ManifoldKind::Sphere && M.retraction == RetractionMethod::Exponential) {
    const Matrix v = sphere_log(X, Y);
    const double theta = v.norm();
    if (theta == 0.0) return w;
    const Matrix u = v / theta;
    const double uw = inner(u, w);
    const Matrix moved = w + (std::cos(theta) - 1.0) * uw * u - std::sin(theta) * uw * X;
    return project_tangent(M, Y, moved);
  }
  return project_tangent(M, Y, w);
}

Matrix riemannian_grad(const ManifoldSpec &M, const Matrix &X, const Matrix &g_euclid) {
  return project_tangent(M, X, g_euclid);
}

double constraint_violation(const ManifoldSpec &M, const Matrix &Y) {
  if (M.kind == ManifoldKind::Sphere) return std::abs(Y.norm() - 1.0);
  const Eigen::Index m = Y.cols();
  return (Y.transpose() * Y - Matrix::Identity(m, m)).norm();
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(rows, cols);
  // Fill column-major explicitly so the draw order is fixed.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) G(i, j) = normal(rng);
  }
  return G;
}

Matrix random_point(const ManifoldSpec &M, std::uint64_t seed) {
  M.validate();
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    const Matrix G = gaussian_matrix(M.rows(), M.cols(), seed + attempt);
    try {
      if (M.kind == ManifoldKind::Sphere) return normalize(G, "random_point");
      // A Gaussian draw is far from St(m, n), outside the series' domain.
      const PointProjection method =
          M.projection == PointProjection::PolarSeries ? PointProjection::Polar : M.projection;
      return stiefel_project(M, G, method);
    } catch (const Error &) {
    }
  }
  throw Error(ErrorKind::DegenerateInput, "random_point: repeated degenerate draws");
}

Matrix random_tangent(const ManifoldSpec &M, const Matrix &X, std::uint64_t seed, double norm) {
  require_shape(M, X, "random_tangent");
  if (norm == 0.0) return Matrix::Zero(X.rows(), X.cols());
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    const Matrix Z = project_tangent(M, X, gaussian_matrix(M.rows(), M.cols(), seed + attempt));
    const double z = Z.norm();
    if (z > 1e-12) return (norm / z) * Z;
  }
  throw Error(ErrorKind::DegenerateInput, "random_tangent: repeated degenerate draws");
}

}  // namespace accel
