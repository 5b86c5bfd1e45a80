#include "accel/integrators.hpp"

#include <algorithm>
#include <cmath>

#include "accel/errors.hpp"

namespace accel {

namespace {

void require_state_finite(const Matrix &A, const Matrix &B, const char *what) {
  if (!A.allFinite() || !B.allFinite()) {
    throw Error(ErrorKind::NonFinite, std::string(what) + ": state became non-finite");
  }
}

bool is_htvi(Method m) { return m == Method::HTVIDirect || m == Method::HTVIAdaptive; }
bool is_el(Method m) { return m == Method::ELI || m == Method::ELII; }

BregmanParams effective_params(Method method, BregmanParams params) {
  if (method == Method::HTVIDirect) params.p_ring = params.p;
  return params;
}

void check_positive(double v, const char *field) {
  if (!(v > 0.0) || std::isnan(v)) {
    throw Error(ErrorKind::InvalidParams, std::string(field) + " must be > 0");
  }
}

struct Measured {
  double f;
  double grad_norm;
};

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ELI: return "EL-I";
    case Method::ELII: return "EL-II";
    case Method::HTVIDirect: return "HTVI-Direct";
    case Method::HTVIAdaptive: return "HTVI-Adaptive";
    case Method::RGD: return "RGD";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::ELI, Method::ELII, Method::HTVIDirect, Method::HTVIAdaptive, Method::RGD}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::MaxIterations: return "max_iter";
    case Termination::Converged: return "converged";
    case Termination::GradientTolerance: return "grad_tol";
    case Termination::Diverged: return "diverged";
    case Termination::Failed: return "failed";
  }
  return "unknown";
}

void BregmanParams::validate(Method method) const {
  check_positive(h, "h");
  if (!std::isfinite(h)) throw Error(ErrorKind::InvalidParams, "h must be finite");
  if (method == Method::RGD) return;
  check_positive(p, "p");
  check_positive(C, "C");
  check_positive(c_max, "c_max");
  if (!std::isfinite(p) || !std::isfinite(C)) {
    throw Error(ErrorKind::InvalidParams, "p and C must be finite");
  }
  if (!(zeta >= 1.0) || !std::isfinite(zeta)) {
    throw Error(ErrorKind::InvalidParams, "zeta must be >= 1");
  }
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "lambda must be in (0, 1]");
  }
  if (is_htvi(method)) {
    if (zeta != 1.0 || lambda != 1.0) {
      throw Error(ErrorKind::InvalidParams, "HTVI updates require zeta = 1 and lambda = 1");
    }
    check_positive(q_frak_0, "q_frak_0");
    if (method == Method::HTVIAdaptive) {
      check_positive(p_ring, "p_ring");
      if (p_ring > p) throw Error(ErrorKind::InvalidParams, "p_ring must satisfy 0 < p_ring <= p");
    }
  }
}

void StopCriteria::validate() const {
  if (max_iter < 1) throw Error(ErrorKind::InvalidParams, "max_iter must be >= 1");
  if (f_tol && !(*f_tol > 0.0)) throw Error(ErrorKind::InvalidParams, "f_tol must be > 0");
  if (grad_tol && !(*grad_tol > 0.0)) throw Error(ErrorKind::InvalidParams, "grad_tol must be > 0");
}

double el_momentum_factor(const BregmanParams &params, long k) {
  return 1.0 - (params.zeta * params.p + params.lambda) / (params.lambda * static_cast<double>(k));
}

double el_gradient_coefficient(const BregmanParams &params, long k) {
  const double t = static_cast<double>(k) * params.h;
  const double c = params.C * params.p * params.p * std::pow(t, params.p - 2.0);
  return std::min(c, params.c_max);
}

double htvi_gradient_coefficient(const BregmanParams &params, double q_frak) {
  const double p = params.p, pr = params.p_ring;
  const double c = (p * p / pr) * params.h * params.C * std::pow(q_frak, 2.0 * p - pr / p);
  return std::min(c, params.c_max * params.h);
}

double htvi_position_coefficient(const BregmanParams &params, double q_frak) {
  const double p = params.p, pr = params.p_ring;
  return (p * p / pr) * params.h * std::pow(q_frak, -p - pr / p);
}

double htvi_time_increment(const BregmanParams &params, double q_frak) {
  const double p = params.p, pr = params.p_ring;
  return (p / pr) * params.h * std::pow(q_frak, 1.0 - pr / p);
}

ELState el_step(const ELState &s, const Problem &P, const ManifoldSpec &M,
                const BregmanParams &params, ELVersion version) {
  if (s.k < 1) throw Error(ErrorKind::InvalidParams, "el_step: k must be >= 1");
  const double b = el_momentum_factor(params, s.k);
  const double c = el_gradient_coefficient(params, s.k);
  const double h = params.h;

  Matrix grad;
  if (version == ELVersion::I) {
    grad = P.riemannian_grad(M, s.X);
  } else {
    const Matrix ahead = retract(M, s.X, h * b * s.V);
    grad = project_tangent(M, s.X, P.riemannian_grad(M, ahead));
  }
  const Matrix a = b * s.V - h * c * grad;
  require_state_finite(a, a, "el_step");

  ELState next;
  next.k = s.k + 1;
  next.X = retract(M, s.X, h * a);
  next.V = transport(M, s.X, next.X, a);
  require_state_finite(next.X, next.V, "el_step");
  return next;
}

HTVIState htvi_step(const HTVIState &s, const Problem &P, const ManifoldSpec &M,
                    const BregmanParams &params) {
  HTVIState next;
  next.k = s.k + 1;
  next.r = s.r - htvi_gradient_coefficient(params, s.q_frak) * P.riemannian_grad(M, s.q);
  if (params.project_momentum) next.r = project_tangent(M, s.q, next.r);
  require_state_finite(next.r, next.r, "htvi_step");
  next.q = project_point(M, s.q + htvi_position_coefficient(params, s.q_frak) * next.r);
  next.q_frak = s.q_frak + htvi_time_increment(params, s.q_frak);
  require_state_finite(next.q, next.r, "htvi_step");
  if (!std::isfinite(next.q_frak)) {
    throw Error(ErrorKind::NonFinite, "htvi_step: time variable became non-finite");
  }
  return next;
}

Matrix rgd_step(const Matrix &X, const Problem &P, const ManifoldSpec &M, double h) {
  Matrix next = retract(M, X, -h * P.riemannian_grad(M, X));
  require_state_finite(next, next, "rgd_step");
  return next;
}

InitialState initial_state(Method method, const Matrix &X0, const BregmanParams &params) {
  const Matrix zero = Matrix::Zero(X0.rows(), X0.cols());
  if (is_el(method)) return ELState{1, X0, zero};
  if (is_htvi(method)) return HTVIState{0, X0, zero, params.q_frak_0};
  return X0;
}

RunResult run(Method method, const Problem &P, const ManifoldSpec &M,
              const BregmanParams &raw_params, const InitialState &init, const StopCriteria &stop,
              long record_every, std::optional<double> f_star) {
  M.validate();
  raw_params.validate(method);
  stop.validate();
  if (record_every < 1) throw Error(ErrorKind::InvalidParams, "record_every must be >= 1");
  const BregmanParams params = effective_params(method, raw_params);

  const bool init_ok = (is_el(method) && std::holds_alternative<ELState>(init)) ||
                       (is_htvi(method) && std::holds_alternative<HTVIState>(init)) ||
                       (method == Method::RGD && std::holds_alternative<Matrix>(init));
  if (!init_ok) {
    throw Error(ErrorKind::InvalidParams,
                std::string("run: initial state does not match method ") +
                    std::string(to_string(method)));
  }

  ELState el;
  HTVIState htvi;
  Matrix x;
  if (auto *e = std::get_if<ELState>(&init)) el = *e;
  if (auto *s = std::get_if<HTVIState>(&init)) htvi = *s;
  if (auto *m = std::get_if<Matrix>(&init)) x = *m;

  auto point = [&]() -> const Matrix & {
    if (is_el(method)) return el.X;
    if (is_htvi(method)) return htvi.q;
    return x;
  };
  auto time_of = [&](long steps) {
    if (is_el(method)) return static_cast<double>(el.k) * params.h;
    if (is_htvi(method)) return htvi.q_frak;
    return static_cast<double>(steps) * params.h;
  };
  auto measure = [&](long steps) {
    const Matrix &X = point();
    TraceRecord rec;
    rec.k = steps;
    rec.t = time_of(steps);
    rec.f_value = P.value(X);
    if (f_star) rec.error = rec.f_value - *f_star;
    rec.constraint_violation = constraint_violation(M, X);
    rec.grad_norm = P.riemannian_grad(M, X).norm();
    return rec;
  };
  auto stop_reason = [&](const TraceRecord &rec) -> std::optional<Termination> {
    if (stop.f_tol && rec.error && *rec.error <= *stop.f_tol) return Termination::Converged;
    if (stop.grad_tol && rec.grad_norm <= *stop.grad_tol) return Termination::GradientTolerance;
    return std::nullopt;
  };

  RunResult result;
  result.final = measure(0);
  if (auto reason = stop_reason(result.final)) {
    result.reason = *reason;
    return result;
  }

  for (long i = 1; i <= stop.max_iter; ++i) {
    try {
      switch (method) {
        case Method::ELI: el = el_step(el, P, M, params, ELVersion::I); break;
        case Method::ELII: el = el_step(el, P, M, params, ELVersion::II); break;
        case Method::HTVIDirect:
        case Method::HTVIAdaptive: htvi = htvi_step(htvi, P, M, params); break;
        case Method::RGD: x = rgd_step(x, P, M, params.h); break;
      }
      TraceRecord rec = measure(i);
      if (!std::isfinite(rec.f_value) || !std::isfinite(rec.grad_norm)) {
        throw Error(ErrorKind::NonFinite, "objective became non-finite");
      }
      result.final = rec;
      result.iterations = i;
    } catch (const Error &e) {
      result.reason = e.kind() == ErrorKind::NonFinite ? Termination::Diverged : Termination::Failed;
      result.message = e.what();
      break;
    }

    const auto reason = stop_reason(result.final);
    const bool last = reason.has_value() || i == stop.max_iter;
    if (i % record_every == 0 || last) result.trace.push_back(result.final);
    if (reason) {
      result.reason = *reason;
      return result;
    }
  }
  if (result.reason == Termination::Diverged || result.reason == Termination::Failed) {
    if (result.iterations > 0 &&
        (result.trace.empty() || result.trace.back().k != result.iterations)) {
      result.trace.push_back(result.final);
    }
  }
  return result;
}

}  // namespace accel
