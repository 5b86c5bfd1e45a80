#include "accel/matops.hpp"

#include <string>

#include "accel/errors.hpp"

namespace accel {

namespace {

void require_tall(const Matrix &Y, const char *what) {
  if (Y.rows() < Y.cols()) {
    throw Error(ErrorKind::ShapeMismatch,
                std::string(what) + ": expected rows >= cols, got " +
                    std::to_string(Y.rows()) + "x" + std::to_string(Y.cols()));
  }
}

void require_square(const Matrix &S, const char *what) {
  if (S.rows() != S.cols()) {
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + ": matrix is not square");
  }
}

}  // namespace

bool all_finite(const Matrix &Y) { return Y.allFinite(); }

void require_finite(const Matrix &Y, const char *what) {
  if (Y.rows() < 1 || Y.cols() < 1) {
    throw Error(ErrorKind::ShapeInvalid, std::string(what) + ": empty matrix");
  }
  if (!Y.allFinite()) {
    throw Error(ErrorKind::NonFinite, std::string(what) + ": matrix has NaN/Inf entries");
  }
}

QrFactors qr_positive(const Matrix &Y) {
  require_finite(Y, "qr_positive");
  require_tall(Y, "qr_positive");
  const Eigen::Index n = Y.rows();
  const Eigen::Index m = Y.cols();

  Eigen::HouseholderQR<Matrix> qr(Y);
  QrFactors out;
  out.Q = qr.householderQ() * Matrix::Identity(n, m);
  out.R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();

  const double tol = 1e-12 * Y.norm();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(out.R(i, i)) <= tol) {
      throw Error(ErrorKind::RankDeficient,
                  "qr_positive: |R(" + std::to_string(i) + "," + std::to_string(i) +
                      ")| below 1e-12 ||Y||_F");
    }
    if (out.R(i, i) < 0.0) {
      out.Q.col(i) *= -1.0;
      out.R.row(i) *= -1.0;
    }
  }
  return out;
}

Matrix qf(const Matrix &Y) { return qr_positive(Y).Q; }

SymEig sym_eig(const Matrix &S) {
  require_finite(S, "sym_eig");
  require_square(S, "sym_eig");
  const double scale = S.norm();
  if ((S - S.transpose()).norm() > 1e-10 * scale) {
    throw Error(ErrorKind::NotSymmetric, "sym_eig: ||S - S^T||_F exceeds 1e-10 ||S||_F");
  }
  const Matrix sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonFinite, "sym_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ThinSvd svd_thin(const Matrix &Y) {
  require_finite(Y, "svd_thin");
  require_tall(Y, "svd_thin");
  Eigen::JacobiSVD<Matrix> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Matrix inv_sqrt_spd(const Matrix &S) {
  const SymEig eig = sym_eig(S);
  const double lmax = eig.values.maxCoeff();
  const double lmin = eig.values.minCoeff();
  if (!(lmax > 0.0) || lmin <= 1e-12 * lmax) {
    throw Error(ErrorKind::NotPositiveDefinite,
                "inv_sqrt_spd: smallest eigenvalue not above 1e-12 times the largest");
  }
  const Vector d = eig.values.array().rsqrt();
  Matrix M = eig.vectors * d.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (M + M.transpose());
}

Matrix polar_factor(const Matrix &Y) {
  const ThinSvd svd = svd_thin(Y);
  const double smax = svd.sigma(0);
  const double smin = svd.sigma(svd.sigma.size() - 1);
  if (!(smax > 0.0) || smin <= 1e-10 * smax) {
    throw Error(ErrorKind::RankDeficient, "polar_factor: sigma_min <= 1e-10 sigma_max");
  }
  return svd.U * svd.V.transpose();
}

Matrix polar_factor_inv_sqrt(const Matrix &Y) {
  require_finite(Y, "polar_factor_inv_sqrt");
  require_tall(Y, "polar_factor_inv_sqrt");
  const Matrix gram = Y.transpose() * Y;
  try {
    return Y * inv_sqrt_spd(gram);
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::NotPositiveDefinite) {
      throw Error(ErrorKind::RankDeficient, "polar_factor_inv_sqrt: Y^T Y is singular");
    }
    throw;
  }
}

Matrix polar_factor_series(const Matrix &Y, int order) {
  require_finite(Y, "polar_factor_series");
  require_tall(Y, "polar_factor_series");
  if (order < 1 || order > 3) {
    throw Error(ErrorKind::InvalidParams, "polar_factor_series: order must be 1, 2 or 3");
  }
  const Eigen::Index m = Y.cols();
  const Matrix E = Y.transpose() * Y - Matrix::Identity(m, m);
  if (E.norm() >= 0.5) {
    throw Error(ErrorKind::TooFarFromManifold,
                "polar_factor_series: ||Y^T Y - I||_F = " + std::to_string(E.norm()) +
                    " >= 0.5");
  }
  static constexpr double kCoeff[] = {1.0, -0.5, 0.375, -0.3125};
  Matrix series = Matrix::Identity(m, m);
  Matrix power = Matrix::Identity(m, m);
  for (int j = 1; j <= order; ++j) {
    power = power * E;
    series += kCoeff[j] * power;
  }
  return Y * series;
}

}  // namespace accel
