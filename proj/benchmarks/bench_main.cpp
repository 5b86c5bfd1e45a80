#include <benchmark/benchmark.h>

#include "accel/integrators.hpp"

using namespace accel;

namespace {

Matrix gaussian(Eigen::Index n, Eigen::Index m) { return gaussian_matrix(n, m, 42); }

void BM_QrPositive(benchmark::State &state) {
  const Matrix Y = gaussian(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(qr_positive(Y));
}
BENCHMARK(BM_QrPositive)->Args({30, 3})->Args({50, 10})->Args({200, 20});

void BM_PolarSvd(benchmark::State &state) {
  const Matrix Y = gaussian(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(polar_factor(Y));
}
BENCHMARK(BM_PolarSvd)->Args({30, 3})->Args({50, 10})->Args({200, 20});

void BM_PolarInvSqrt(benchmark::State &state) {
  const Matrix Y = gaussian(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(polar_factor_inv_sqrt(Y));
}
BENCHMARK(BM_PolarInvSqrt)->Args({30, 3})->Args({50, 10})->Args({200, 20});

void BM_PolarSeries(benchmark::State &state) {
  const auto M = ManifoldSpec::stiefel(state.range(0), state.range(1));
  const Matrix Y = random_point(M, 1) + 1e-3 * gaussian(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(polar_factor_series(Y, 3));
}
BENCHMARK(BM_PolarSeries)->Args({30, 3})->Args({50, 10})->Args({200, 20});

void BM_SymEig(benchmark::State &state) {
  const Matrix A = gen_symmetric(state.range(0), log_spaced_spectrum(state.range(0), 1e3), 3);
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(A));
}
BENCHMARK(BM_SymEig)->Arg(30)->Arg(100);

Problem rayleigh(Eigen::Index n) { return Problem(Rayleigh{gen_symmetric(n, log_spaced_spectrum(n, 1e3), 3)}); }

Problem brockett(Eigen::Index n, Eigen::Index m) {
  Vector mu(m);
  for (Eigen::Index i = 0; i < m; ++i) mu(i) = static_cast<double>(i + 1);
  return Problem(Brockett{gen_symmetric(n, log_spaced_spectrum(n, 10.0), 3), mu});
}

// range(0) selects the method, range(1) the problem: 0 = Rayleigh n=100,
// 1 = Brockett St(3, 30).
void BM_Step(benchmark::State &state) {
  const auto method = static_cast<Method>(state.range(0));
  const Problem P = state.range(1) == 0 ? rayleigh(100) : brockett(30, 3);
  const ManifoldSpec M = P.default_manifold();
  BregmanParams params;
  params.p = 4;
  params.p_ring = method == Method::HTVIAdaptive ? 2 : 4;
  params.h = 1e-3;
  InitialState s = initial_state(method, random_point(M, 5), params);
  for (auto _ : state) {
    if (auto *el = std::get_if<ELState>(&s)) {
      *el = el_step(*el, P, M, params, method == Method::ELI ? ELVersion::I : ELVersion::II);
    } else if (auto *hs = std::get_if<HTVIState>(&s)) {
      *hs = htvi_step(*hs, P, M, params);
    } else {
      auto &x = std::get<Matrix>(s);
      x = rgd_step(x, P, M, params.h);
    }
  }
  state.SetLabel(std::string(to_string(method)) + (state.range(1) == 0 ? " rayleigh" : " brockett"));
}
BENCHMARK(BM_Step)->ArgsProduct({{0, 1, 2, 3, 4}, {0, 1}});

}  // namespace
BENCHMARK_MAIN();
