#pragma once

#include <Eigen/Dense>

namespace accel {

/// Dense real matrix in the ambient space R^{n x m}. Points, tangent vectors
/// and momenta all live here.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Throws NonFinite if any entry is NaN/Inf and ShapeInvalid on an empty
/// matrix.
void require_finite(const Matrix &Y, const char *what);

bool all_finite(const Matrix &Y);

struct QrFactors {
  Matrix Q;  // n x m, orthonormal columns
  Matrix R;  // m x m, upper triangular with positive diagonal
};

/// Thin QR with the sign ambiguity resolved so that diag(R) > 0.
/// Throws RankDeficient if |R_ii| < 1e-12 ||Y||_F for some i.
QrFactors qr_positive(const Matrix &Y);

/// Q factor of qr_positive.
Matrix qf(const Matrix &Y);

struct SymEig {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

/// Eigendecomposition of a symmetric matrix. The input is symmetrized first;
/// asymmetry above 1e-10 relative is rejected as NotSymmetric.
SymEig sym_eig(const Matrix &S);

struct ThinSvd {
  Matrix U;       // n x m
  Vector sigma;   // m, descending, nonnegative
  Matrix V;       // m x m orthogonal
};

/// Thin SVD of an n x m matrix with n >= m.
ThinSvd svd_thin(const Matrix &Y);

/// S^{-1/2} for symmetric positive definite S, computed as V diag(l^{-1/2}) V^T.
/// Throws NotPositiveDefinite if l_min <= 1e-12 l_max.
Matrix inv_sqrt_spd(const Matrix &S);

/// Orthonormal polar factor U V^T of a full column rank matrix (SVD route).
Matrix polar_factor(const Matrix &Y);

/// Same factor as polar_factor, computed as Y (Y^T Y)^{-1/2}.
Matrix polar_factor_inv_sqrt(const Matrix &Y);

/// Truncated binomial series of Y (Y^T Y)^{-1/2} around Y^T Y = I:
///   Y (I - E/2 + 3E^2/8 - 5E^3/16),  E = Y^T Y - I,
/// keeping terms up to E^order, order in {1, 2, 3}.
/// Throws TooFarFromManifold when ||E||_F >= 0.5.
Matrix polar_factor_series(const Matrix &Y, int order);

}  // namespace accel
