#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "accel/errors.hpp"
#include "accel/manifold.hpp"
#include "support/oracles.hpp"

using namespace accel;

namespace {

Matrix e(Eigen::Index n, Eigen::Index i) {
  Matrix v = Matrix::Zero(n, 1);
  v(i, 0) = 1.0;
  return v;
}

std::vector<ManifoldSpec> all_configs() {
  return {
      ManifoldSpec::sphere(7, RetractionMethod::Exponential),
      ManifoldSpec::sphere(7, RetractionMethod::ProjectiveNormalize),
      ManifoldSpec::stiefel(8, 3, PointProjection::Polar, RetractionMethod::Polar),
      ManifoldSpec::stiefel(8, 3, PointProjection::QF, RetractionMethod::QF),
      ManifoldSpec::stiefel(8, 3, PointProjection::PolarSeries, RetractionMethod::Polar),
  };
}

}  // namespace

TEST(ManifoldSpec, RejectsBadCombinations) {
  EXPECT_THROW(ManifoldSpec::sphere(1), Error);
  EXPECT_THROW(ManifoldSpec::sphere(3, RetractionMethod::Polar), Error);
  EXPECT_THROW(ManifoldSpec::stiefel(2, 3), Error);
  EXPECT_THROW(ManifoldSpec::stiefel(4, 2, PointProjection::Normalize), Error);
  EXPECT_THROW(ManifoldSpec::stiefel(4, 2, PointProjection::Polar, RetractionMethod::Exponential),
               Error);
  EXPECT_THROW(ManifoldSpec::stiefel(4, 2, PointProjection::PolarSeries, RetractionMethod::Polar, 5),
               Error);
}

TEST(ProjectPoint, SphereNormalizes) {
  const auto M = ManifoldSpec::sphere(2);
  Matrix y(2, 1);
  y << 3, 4;
  const Matrix x = project_point(M, y);
  EXPECT_NEAR(x(0), 0.6, 1e-15);
  EXPECT_NEAR(x(1), 0.8, 1e-15);
}

TEST(ProjectPoint, StiefelMethodsFixManifoldPoints) {
  for (auto proj : {PointProjection::Polar, PointProjection::QF, PointProjection::PolarSeries}) {
    const auto M = ManifoldSpec::stiefel(6, 2, proj, RetractionMethod::Polar);
    const Matrix X = random_point(M, 4);
    EXPECT_LE((project_point(M, X) - X).norm(), 1e-13) << to_string(proj);
  }
}

TEST(ProjectPoint, StiefelColumnMatchesSphere) {
  const auto M = ManifoldSpec::stiefel(2, 1);
  Matrix y(2, 1);
  y << 3, 4;
  EXPECT_LE((project_point(M, y) - project_point(ManifoldSpec::sphere(2), y)).norm(), 1e-15);
}

TEST(ProjectPoint, DegenerateInputs) {
  try {
    project_point(ManifoldSpec::sphere(3), Matrix::Zero(3, 1));
    FAIL();
  } catch (const Error &err) {
    EXPECT_EQ(err.kind(), ErrorKind::DegenerateInput);
  }
  Matrix Y = Matrix::Zero(4, 2);
  Y(0, 0) = Y(0, 1) = 1.0;
  try {
    project_point(ManifoldSpec::stiefel(4, 2), Y);
    FAIL();
  } catch (const Error &err) {
    EXPECT_EQ(err.kind(), ErrorKind::DegenerateInput);
  }
  const auto series = ManifoldSpec::stiefel(4, 2, PointProjection::PolarSeries);
  try {
    project_point(series, 3.0 * Matrix::Identity(4, 2));
    FAIL();
  } catch (const Error &err) {
    EXPECT_EQ(err.kind(), ErrorKind::TooFarFromManifold);
  }
  EXPECT_THROW(project_point(ManifoldSpec::sphere(3), Matrix::Ones(2, 1)), Error);
}

TEST(ProjectTangent, Examples) {
  const auto S = ManifoldSpec::sphere(4);
  const Matrix x = random_point(S, 1);
  EXPECT_LE(project_tangent(S, x, x).norm(), 1e-15);

  const auto St = ManifoldSpec::stiefel(2, 2);
  EXPECT_LE(project_tangent(St, Matrix::Identity(2, 2), Matrix::Identity(2, 2)).norm(), 0.0);

  const Matrix X = random_point(ManifoldSpec::stiefel(5, 2), 2);
  const auto M = ManifoldSpec::stiefel(5, 2);
  const Matrix xi = random_tangent(M, X, 3, 1.0);
  EXPECT_LE((project_tangent(M, X, xi) - xi).norm(), 1e-14);
  EXPECT_THROW(project_tangent(M, X, Matrix::Ones(5, 3)), Error);
}

TEST(ProjectTangent, IdempotentAndSelfAdjoint) {
  for (const auto &M : all_configs()) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Matrix X = random_point(M, s);
      const Matrix Z = gaussian_matrix(M.rows(), M.cols(), 100 + s);
      const Matrix W = gaussian_matrix(M.rows(), M.cols(), 200 + s);
      const Matrix PZ = project_tangent(M, X, Z);
      EXPECT_LE((project_tangent(M, X, PZ) - PZ).norm(), 1e-13);
      EXPECT_NEAR(inner(PZ, W), inner(Z, project_tangent(M, X, W)), 1e-10);
      const Matrix XtV = X.transpose() * PZ;
      EXPECT_LE((XtV + XtV.transpose()).norm(), 1e-12);
    }
  }
}

TEST(Retract, ZeroTangentReturnsBasePointExactly) {
  for (const auto &M : all_configs()) {
    const Matrix X = random_point(M, 5);
    EXPECT_EQ(retract(M, X, Matrix::Zero(M.rows(), M.cols())), X);
  }
}

TEST(Retract, SphereQuarterGreatCircle) {
  const auto M = ManifoldSpec::sphere(3);
  const Matrix y = retract(M, e(3, 0), (std::numbers::pi / 2) * e(3, 1));
  EXPECT_LE((y - e(3, 1)).norm(), 1e-15);
}

TEST(Retract, PolarFixesOrthonormalSum) {
  // (X + xi)^T (X + xi) = I already: the polar retraction returns X + xi.
  const auto M = ManifoldSpec::stiefel(4, 2);
  const Matrix X = Matrix::Identity(4, 2);
  Matrix target = Matrix::Zero(4, 2);
  target(0, 0) = std::cos(0.3);
  target(1, 0) = std::sin(0.3);
  target(2, 1) = 1.0;
  EXPECT_LE((retract(M, X, target - X) - target).norm(), 1e-14);
}

TEST(Retract, StaysOnManifold) {
  for (const auto &M : all_configs()) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Matrix X = random_point(M, s);
      const Matrix xi = random_tangent(M, X, 50 + s, 0.1 + 0.3 * (s % 5));
      EXPECT_LE(constraint_violation(M, retract(M, X, xi)), 1e-12);
    }
  }
}

TEST(Retract, FirstOrderAgreementWithTangent) {
  const std::vector<double> ts = {1e-2, 1e-3, 1e-4};
  for (const auto &M : all_configs()) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Matrix X = random_point(M, s);
      const Matrix xi = random_tangent(M, X, 77 + s, 1.0);
      std::vector<double> errs;
      for (double t : ts) errs.push_back(((retract(M, X, t * xi) - X) / t - xi).norm());
      for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_LE(errs[i], 10.0 * ts[i]);
      EXPECT_GE(test_oracles::loglog_slope(ts, errs), 0.9) << to_string(M.retraction);
    }
  }
}

TEST(Transport, SameBaseIsIdentity) {
  for (const auto &M : all_configs()) {
    const Matrix X = random_point(M, 1);
    const Matrix w = random_tangent(M, X, 2, 1.5);
    EXPECT_LE((transport(M, X, X, w) - w).norm(), 1e-14);
  }
}

TEST(Transport, SphereParallelRotatesVelocity) {
  const auto M = ManifoldSpec::sphere(3);
  const double alpha = 0.7;
  const Matrix moved = transport(M, e(3, 0), e(3, 1), alpha * e(3, 1));
  EXPECT_LE((moved + alpha * e(3, 0)).norm(), 1e-15);
}

TEST(Transport, SphereNormalComponentUnchanged) {
  const auto M = ManifoldSpec::sphere(3);
  const Matrix w = 1.3 * e(3, 2);
  EXPECT_LE((transport(M, e(3, 0), e(3, 1), w) - w).norm(), 1e-15);
}

TEST(Transport, SphereParallelIsIsometry) {
  const auto M = ManifoldSpec::sphere(12);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Matrix x = random_point(M, s);
    const Matrix y = retract(M, x, random_tangent(M, x, 300 + s, 0.1 + 0.05 * (s % 40)));
    const Matrix a = random_tangent(M, x, 500 + s, 1.0);
    const Matrix b = random_tangent(M, x, 700 + s, 2.0);
    const Matrix ta = transport(M, x, y, a);
    const Matrix tb = transport(M, x, y, b);
    EXPECT_NEAR(ta.norm(), a.norm(), 1e-10);
    EXPECT_NEAR(inner(ta, tb), inner(a, b), 1e-10);
    EXPECT_LE(std::abs(inner(ta, y)), 1e-12);
  }
}

TEST(Transport, SphereAntipodalThrows) {
  const auto M = ManifoldSpec::sphere(3);
  try {
    transport(M, e(3, 0), -e(3, 0), e(3, 1));
    FAIL();
  } catch (const Error &err) {
    EXPECT_EQ(err.kind(), ErrorKind::AntipodalPoints);
  }
}

TEST(SphereGeodesics, LogInvertsExp) {
  const auto M = ManifoldSpec::sphere(6);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix x = random_point(M, s);
    const Matrix v = random_tangent(M, x, 40 + s, 0.2 + 0.1 * (s % 20));
    EXPECT_LE((sphere_log(x, sphere_exp(x, v)) - v).norm(), 1e-12);
  }
  // Below the Taylor threshold.
  const Matrix x = random_point(M, 1);
  const Matrix v = random_tangent(M, x, 2, 1e-10);
  EXPECT_LE((sphere_exp(x, v) - (x + v)).norm(), 1e-19 + 1e-16);
  EXPECT_LE((sphere_log(x, sphere_exp(x, v)) - v).norm(), 1e-15);
}

TEST(ConstraintViolation, Examples) {
  const auto S = ManifoldSpec::sphere(3);
  EXPECT_LE(constraint_violation(S, random_point(S, 3)), 1e-12);
  EXPECT_NEAR(constraint_violation(S, 2.0 * e(3, 0)), 1.0, 1e-15);
  const auto St = ManifoldSpec::stiefel(2, 2);
  EXPECT_NEAR(constraint_violation(St, 2.0 * Matrix::Identity(2, 2)), 3.0 * std::sqrt(2.0), 1e-14);
}

TEST(RandomDraws, DeterministicAndValid) {
  for (const auto &M : all_configs()) {
    const Matrix a = random_point(M, 42);
    EXPECT_EQ(a, random_point(M, 42));
    EXPECT_NE(a, random_point(M, 43));
    EXPECT_LE(constraint_violation(M, a), 1e-12);
    const Matrix t = random_tangent(M, a, 9, 2.5);
    EXPECT_EQ(t, random_tangent(M, a, 9, 2.5));
    EXPECT_NEAR(t.norm(), 2.5, 1e-12);
    EXPECT_LE((project_tangent(M, a, t) - t).norm(), 1e-12);
    EXPECT_EQ(random_tangent(M, a, 9, 0.0).norm(), 0.0);
  }
}

TEST(StiefelOneColumn, MatchesSphere) {
  const auto S = ManifoldSpec::sphere(9, RetractionMethod::ProjectiveNormalize);
  const auto St = ManifoldSpec::stiefel(9, 1, PointProjection::Polar, RetractionMethod::Polar);
  const auto Sq = ManifoldSpec::stiefel(9, 1, PointProjection::QF, RetractionMethod::QF);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix x = random_point(S, s);
    const Matrix y = gaussian_matrix(9, 1, 60 + s);
    const Matrix z = gaussian_matrix(9, 1, 80 + s);
    const Matrix v = random_tangent(S, x, 90 + s, 0.4);
    for (const auto &M : {St, Sq}) {
      EXPECT_LE((project_point(M, y) - project_point(S, y)).norm(), 1e-12);
      EXPECT_LE((project_tangent(M, x, z) - project_tangent(S, x, z)).norm(), 1e-12);
      EXPECT_LE((retract(M, x, v) - retract(S, x, v)).norm(), 1e-12);
      const Matrix x2 = retract(S, x, v);
      EXPECT_LE((transport(M, x, x2, v) - transport(S, x, x2, v)).norm(), 1e-12);
      EXPECT_NEAR(constraint_violation(M, y), std::abs(y.norm() * y.norm() - 1.0), 1e-12);
    }
  }
}
