#include "accel/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "accel/errors.hpp"

namespace accel {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int kMaxBruteForceColumns = 8;

void require_symmetric(const Matrix &A, const char *what) {
  require_finite(A, what);
  if (A.rows() != A.cols()) {
    throw Error(ErrorKind::ShapeInvalid, std::string(what) + ": A must be square");
  }
  if ((A - A.transpose()).norm() > 1e-12 * std::max(1.0, A.norm())) {
    throw Error(ErrorKind::NotSymmetric, std::string(what) + ": A must be symmetric");
  }
}

double brockett_cost(const Vector &lambda, const Vector &mu, const std::vector<int> &perm) {
  double total = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) total += mu(i) * lambda(perm[i]);
  return total;
}

Oracle procrustes_reference(const Problem &problem, const Procrustes &p,
                            const ReferenceOptions &opts) {
  const Eigen::Index n = p.A.cols();
  const ManifoldSpec M = problem.default_manifold();
  const double sigma_max = svd_thin(p.A.rows() >= n ? p.A : Matrix(p.A.transpose())).sigma(0);
  const double step = 1.0 / (2.0 * sigma_max * sigma_max);

  std::vector<Matrix> starts;
  // Polar factor of the unconstrained least-squares fit is a good warm start.
  const Matrix ls = p.A.colPivHouseholderQr().solve(p.B);
  try {
    starts.push_back(polar_factor(ls));
  } catch (const Error &) {
  }
  for (int r = 0; r < opts.restarts; ++r) starts.push_back(random_point(M, opts.seed + 7919 * r));

  Oracle best{std::numeric_limits<double>::infinity(), std::nullopt, "numerical"};
  for (Matrix X : starts) {
    const double gscale = std::max(1.0, problem.euclidean_grad(X).norm());
    for (int k = 0; k < opts.iterations; ++k) {
      const Matrix g = problem.riemannian_grad(M, X);
      if (g.norm() <= 1e-14 * gscale) break;
      X = retract(M, X, -step * g);
    }
    const double f = problem.value(X);
    if (f < best.f_star) {
      best.f_star = f;
      best.X_star = X;
    }
  }
  return best;
}

}  // namespace

Problem::Problem(Variant instance) : instance_(std::move(instance)) {
  std::visit(overloaded{
                 [](const Rayleigh &r) { require_symmetric(r.A, "Rayleigh"); },
                 [](const Brockett &b) {
                   require_symmetric(b.A, "Brockett");
                   if (b.mu.size() < 1 || b.mu.size() > b.A.rows()) {
                     throw Error(ErrorKind::ShapeInvalid, "Brockett: need 1 <= m <= n");
                   }
                   for (Eigen::Index i = 0; i < b.mu.size(); ++i) {
                     if (!std::isfinite(b.mu(i)) || b.mu(i) < 0.0 ||
                         (i > 0 && b.mu(i) < b.mu(i - 1))) {
                       throw Error(ErrorKind::InvalidParams,
                                   "Brockett: N must be diagonal, nonnegative and ascending");
                     }
                   }
                 },
                 [](const Procrustes &p) {
                   require_finite(p.A, "Procrustes A");
                   require_finite(p.B, "Procrustes B");
                   const auto l = p.A.rows(), n = p.A.cols(), m = p.B.cols();
                   if (p.B.rows() != l || l < n || l <= m || n < m) {
                     throw Error(ErrorKind::ShapeInvalid,
                                 "Procrustes: need A l x n, B l x m with l >= n, l > m, n >= m");
                   }
                   if (p.planted && (p.planted->rows() != n || p.planted->cols() != m)) {
                     throw Error(ErrorKind::ShapeInvalid, "Procrustes: planted solution shape");
                   }
                 },
             },
             instance_);
}

std::string_view Problem::name() const {
  return std::visit(overloaded{
                        [](const Rayleigh &) { return std::string_view("rayleigh"); },
                        [](const Brockett &) { return std::string_view("brockett"); },
                        [](const Procrustes &) { return std::string_view("procrustes"); },
                    },
                    instance_);
}

Eigen::Index Problem::rows() const {
  return std::visit(overloaded{
                        [](const Rayleigh &r) { return r.A.rows(); },
                        [](const Brockett &b) { return b.A.rows(); },
                        [](const Procrustes &p) { return p.A.cols(); },
                    },
                    instance_);
}

Eigen::Index Problem::cols() const {
  return std::visit(overloaded{
                        [](const Rayleigh &) { return Eigen::Index{1}; },
                        [](const Brockett &b) { return b.mu.size(); },
                        [](const Procrustes &p) { return p.B.cols(); },
                    },
                    instance_);
}

ManifoldSpec Problem::default_manifold() const {
  if (std::holds_alternative<Rayleigh>(instance_)) return ManifoldSpec::sphere(rows());
  return ManifoldSpec::stiefel(rows(), cols());
}

void Problem::require_point_shape(const Matrix &X, const char *what) const {
  if (X.rows() != rows() || X.cols() != cols()) {
    throw Error(ErrorKind::ShapeMismatch,
                std::string(what) + ": point must be " + std::to_string(rows()) + "x" +
                    std::to_string(cols()));
  }
}

double Problem::value(const Matrix &X) const {
  require_point_shape(X, "value");
  return std::visit(
      overloaded{
          [&](const Rayleigh &r) { return -(X.transpose() * r.A * X)(0, 0); },
          [&](const Brockett &b) {
            return ((X.transpose() * b.A * X) * b.mu.asDiagonal()).trace();
          },
          [&](const Procrustes &p) { return (p.A * X - p.B).squaredNorm(); },
      },
      instance_);
}

Matrix Problem::euclidean_grad(const Matrix &X) const {
  require_point_shape(X, "euclidean_grad");
  return std::visit(overloaded{
                        [&](const Rayleigh &r) -> Matrix { return -2.0 * (r.A * X); },
                        [&](const Brockett &b) -> Matrix {
                          return 2.0 * (b.A * X) * b.mu.asDiagonal();
                        },
                        [&](const Procrustes &p) -> Matrix {
                          return 2.0 * p.A.transpose() * (p.A * X - p.B);
                        },
                    },
                    instance_);
}

Matrix Problem::riemannian_grad(const ManifoldSpec &M, const Matrix &X) const {
  return accel::riemannian_grad(M, X, euclidean_grad(X));
}

Oracle Problem::oracle(const ReferenceOptions &reference) const {
  return std::visit(
      overloaded{
          [&](const Rayleigh &r) -> Oracle {
            const SymEig eig = sym_eig(r.A);
            const Eigen::Index top = eig.values.size() - 1;
            Matrix x = eig.vectors.col(top);
            return {-eig.values(top), x, "eigendecomposition"};
          },
          [&](const Brockett &b) -> Oracle {
            const SymEig eig = sym_eig(b.A);
            const Eigen::Index m = b.mu.size();
            const Vector lambda = eig.values.head(m);
            std::vector<int> pairing(m);
            if (m <= kMaxBruteForceColumns) {
              pairing = brockett_pairing_bruteforce(lambda, b.mu);
            } else {
              // Rearrangement: the largest weight takes the smallest eigenvalue.
              for (Eigen::Index i = 0; i < m; ++i) pairing[i] = static_cast<int>(m - 1 - i);
            }
            Matrix X(b.A.rows(), m);
            for (Eigen::Index i = 0; i < m; ++i) X.col(i) = eig.vectors.col(pairing[i]);
            return {((X.transpose() * b.A * X) * b.mu.asDiagonal()).trace(), X,
                    "eigendecomposition"};
          },
          [&](const Procrustes &p) -> Oracle {
            if (p.A.cols() == p.B.cols()) {
              // Maximizes Trace(B^T A X); with A^T B = U S V^T the optimum is U V^T.
              const Matrix cross = p.A.transpose() * p.B;
              const ThinSvd svd = svd_thin(cross);
              const double smax = svd.sigma(0);
              if (!(smax > 0.0) || svd.sigma(svd.sigma.size() - 1) <= 1e-12 * smax) {
                throw Error(ErrorKind::SingularCrossProduct,
                            "balanced Procrustes: B^T A is singular");
              }
              Matrix X = svd.U * svd.V.transpose();
              return {value(X), X, "closed_form"};
            }
            if (p.planted) return {value(*p.planted), *p.planted, "planted"};
            return procrustes_reference(*this, p, reference);
          },
      },
      instance_);
}

std::vector<int> brockett_pairing_bruteforce(const Vector &lambda_smallest, const Vector &mu) {
  const auto m = static_cast<int>(mu.size());
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = brockett_cost(lambda_smallest, mu, perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double c = brockett_cost(lambda_smallest, mu, perm);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  }
  return best;
}

std::vector<double> log_spaced_spectrum(Eigen::Index n, double kappa) {
  if (n < 1 || !(kappa >= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "log_spaced_spectrum: need n >= 1 and kappa >= 1");
  }
  std::vector<double> s(n);
  const double top = std::log10(kappa);
  for (Eigen::Index i = 0; i < n; ++i) {
    s[i] = n == 1 ? 1.0 : std::pow(10.0, top * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return s;
}

namespace {
// Instance generators draw from salted streams so that an initial point seeded
// with the same (or a nearby) integer is not a column of the instance.
constexpr std::uint64_t kSymmetricSalt = 0x5bd1e9955bd1e995ULL;
constexpr std::uint64_t kProcrustesSalt = 0x9e3779b97f4a7c15ULL;
}  // namespace

Matrix gen_symmetric(Eigen::Index n, const std::vector<double> &spectrum, std::uint64_t seed) {
  if (n < 2 || static_cast<Eigen::Index>(spectrum.size()) != n) {
    throw Error(ErrorKind::InvalidParams, "gen_symmetric: need n >= 2 and n spectrum entries");
  }
  const Matrix Q = qf(gaussian_matrix(n, n, seed ^ kSymmetricSalt));
  const Vector d = Eigen::Map<const Vector>(spectrum.data(), n);
  Matrix A = Q * d.asDiagonal() * Q.transpose();
  return 0.5 * (A + A.transpose());
}

ProcrustesData gen_procrustes(Eigen::Index l, Eigen::Index n, Eigen::Index m, std::uint64_t seed,
                              double noise) {
  if (l < n || l <= m || n < m || m < 1) {
    throw Error(ErrorKind::ShapeInvalid, "gen_procrustes: need l >= n >= m >= 1 and l > m");
  }
  if (!(noise >= 0.0)) throw Error(ErrorKind::InvalidParams, "gen_procrustes: noise must be >= 0");
  ProcrustesData out;
  const std::uint64_t base = seed ^ kProcrustesSalt;
  out.A = gaussian_matrix(l, n, base);
  out.X0 = random_point(ManifoldSpec::stiefel(n, m), base + 1);
  out.B = out.A * out.X0;
  if (noise > 0.0) out.B += noise * gaussian_matrix(l, m, base + 2);
  return out;
}

}  // namespace accel
