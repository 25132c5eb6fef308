#include "casimir/casimir.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "casimir/errors.hpp"

namespace casimir {

const char* to_string(WarmStart ws) {
  switch (ws) {
    case WarmStart::prox_center: return "prox-center";
    case WarmStart::prev_iterate: return "prev-iterate";
    case WarmStart::extrapolation: return "extrapolation";
  }
  return "?";
}

WarmStart parse_warm_start(const std::string& name) {
  if (name == "prox-center") return WarmStart::prox_center;
  if (name == "prev-iterate") return WarmStart::prev_iterate;
  if (name == "extrapolation") return WarmStart::extrapolation;
  throw ConfigError("unknown warm start '" + name + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

// Wall time spent in the solver, excluding trace evaluation.
class SolverClock {
 public:
  void resume() { start_ = Clock::now(); }
  void pause() { total_ += std::chrono::duration<double, std::milli>(Clock::now() - start_).count(); }
  double ms() const { return total_; }

 private:
  Clock::time_point start_ = Clock::now();
  double total_ = 0.0;
};

TraceRow make_row(const ComponentLosses& losses, const Regularizer& reg,
                  const std::optional<SmoothingConfig>& smoothing, bool with_smoothed, std::size_t iter,
                  const Vector& w, const OracleCounter& counter, double wall_ms) {
  TraceRow row;
  row.iter = iter;
  row.objective = objective(losses, w, reg, std::nullopt, false).value;
  row.smoothed_objective =
      (smoothing && with_smoothed) ? objective(losses, w, reg, smoothing, false).value : row.objective;
  row.oracle_calls = counter.oracle_calls;
  row.anchor_calls = counter.anchor_calls;
  row.wall_ms = wall_ms;
  return row;
}

void emit(RunResult& r, TraceRow row, const Vector& w, const RowCallback& on_row) {
  r.trace.push_back(row);
  if (on_row) on_row(r.trace.back(), w);
}

}  // namespace

RunResult casimir_run(const ComponentLosses& losses, const Regularizer& reg, const CasimirConfig& config,
                      const Vector& w0, const RowCallback& on_row) {
  if (static_cast<std::size_t>(w0.size()) != losses.dim()) throw InvalidInput("w0 has the wrong dimension");
  ScheduleParams params = config.schedule;
  params.lambda = reg.lambda;
  params.n = losses.size();
  if (config.lipschitz) {
    if (!(*config.lipschitz > 0.0)) throw ConfigError("lipschitz constant must be positive");
    params.a_omega = *config.lipschitz * CasimirSchedule::make(params).base_mu();
  } else {
    params.a_omega = std::max(losses.max_row_norm_sq(), 1e-12);
  }
  const CasimirSchedule sched = CasimirSchedule::make(params);
  const double lambda = reg.lambda;

  RunResult r;
  r.a_omega = params.a_omega;
  r.w = w0;
  OracleCounter counter;
  SolverClock clock;
  const auto smoothing_at = [&](std::size_t k) {
    SmoothingConfig s{config.smoother, sched.mu(k), config.topk};
    s.validate();
    return s;
  };
  emit(r, make_row(losses, reg, smoothing_at(1), config.trace_smoothed, 0, w0, counter, 0.0), w0, on_row);

  Rng rng(config.seed);
  Vector w_prev = w0, z_prev = w0, z_prev2 = w0;
  double alpha_prev = sched.alpha0();
  for (std::size_t k = 1; k <= config.outer_iters; ++k) {
    clock.resume();
    const double kappa_k = sched.kappa(k);
    const double kappa_next = sched.kappa(k + 1);
    const SmoothingConfig smoothing = smoothing_at(k);
    Subproblem sub{&losses, reg, smoothing, kappa_k, z_prev};

    Vector start;
    switch (config.warm_start) {
      case WarmStart::prox_center: start = z_prev; break;
      case WarmStart::prev_iterate: start = w_prev; break;
      case WarmStart::extrapolation: start = w_prev + (kappa_k / (kappa_k + lambda)) * (z_prev - z_prev2); break;
    }
    InnerSolverBudget budget = config.inner;
    if (budget.mode == InnerSolverBudget::Mode::relative_accuracy) budget.delta = sched.delta(k);
    const double step = config.step ? *config.step : 1.0 / (params.a_omega / smoothing.mu + lambda + kappa_k);

    SvrgResult inner;
    try {
      inner = svrg_solve(sub, start, budget, step, rng, counter);
    } catch (const DivergenceError& e) {
      throw DivergenceError("outer iteration " + std::to_string(k) + ": " + e.what());
    }
    const Vector& w = inner.w;
    const double alpha = alpha_update(alpha_prev, kappa_k, kappa_next, lambda);
    const double beta = beta_coeff(alpha_prev, alpha, kappa_k, kappa_next, lambda);
    Vector z = w + beta * (w - w_prev);
    clock.pause();

    TraceRow row = make_row(losses, reg, smoothing, config.trace_smoothed, k, w, counter, clock.ms());
    row.prox_distance = (w - z_prev).norm();
    if (!std::isfinite(row.objective))
      throw DivergenceError("outer iteration " + std::to_string(k) + ": non-finite objective");
    emit(r, row, w, on_row);

    z_prev2 = std::move(z_prev);
    z_prev = std::move(z);
    w_prev = w;
    alpha_prev = alpha;
  }
  r.w = w_prev;
  return r;
}

RunResult sgd_run(const ComponentLosses& losses, const Regularizer& reg, const SgdConfig& config,
                  const Vector& w0, const RowCallback& on_row) {
  if (!(config.gamma0 >= 0.0)) throw InvalidInput("gamma0 must be non-negative");
  if (!(config.t0 >= 1.0)) throw InvalidInput("t0 must be at least 1");
  const std::size_t n = losses.size();
  if (n == 0) throw InvalidInput("SGD over an empty dataset");

  RunResult r;
  r.a_omega = losses.max_row_norm_sq();
  OracleCounter counter;
  SolverClock clock;
  emit(r, make_row(losses, reg, std::nullopt, false, 0, w0, counter, 0.0), w0, on_row);

  Rng rng(config.seed);
  Vector w = w0, g(w0.size());
  std::size_t t = 0;
  for (std::size_t e = 1; e <= config.epochs; ++e) {
    clock.resume();
    for (std::size_t s = 0; s < n; ++s, ++t) {
      const std::size_t i = sample_index(rng, n);
      const OracleResult o = losses.oracle(i, w, std::nullopt);
      ++counter.oracle_calls;
      g.setZero();
      losses.add_gradient(i, w, o, 1.0, g);
      reg.add_gradient(w, 1.0, g);
      const double gamma = config.gamma0 / (1.0 + std::floor(static_cast<double>(t) / config.t0));
      w -= gamma * g;
    }
    clock.pause();
    if (!w.allFinite()) throw DivergenceError("SGD epoch " + std::to_string(e) + ": non-finite iterate");
    emit(r, make_row(losses, reg, std::nullopt, false, e, w, counter, clock.ms()), w, on_row);
  }
  r.w = std::move(w);
  return r;
}

RunResult svrg_run(const ComponentLosses& losses, const Regularizer& reg, const SvrgRunConfig& config,
                   const Vector& w0, const RowCallback& on_row) {
  config.smoothing.validate();
  const std::size_t n = losses.size();
  RunResult r;
  r.a_omega = std::max(losses.max_row_norm_sq(), 1e-12);
  OracleCounter counter;
  SolverClock clock;
  emit(r, make_row(losses, reg, config.smoothing, true, 0, w0, counter, 0.0), w0, on_row);
  if (config.epochs == 0) {
    r.w = w0;
    return r;
  }

  Subproblem sub{&losses, reg, config.smoothing, 0.0, Vector::Zero(w0.size())};
  InnerSolverBudget budget;
  budget.mode = InnerSolverBudget::Mode::fixed_iterations;
  budget.t_budget = config.epochs * n;
  const double step = config.step ? *config.step : 1.0 / (r.a_omega / config.smoothing.mu + reg.lambda);
  Rng rng(config.seed);
  clock.resume();
  const SvrgResult res = svrg_solve(sub, w0, budget, step, rng, counter, [&](std::size_t e, const Vector& w) {
    clock.pause();
    emit(r, make_row(losses, reg, config.smoothing, true, e, w, counter, clock.ms()), w, on_row);
    clock.resume();
  });
  clock.pause();
  r.w = res.w;
  return r;
}

ReferenceResult full_gradient_reference(const ComponentLosses& losses, const Regularizer& reg,
                                        const std::optional<SmoothingConfig>& smoothing, const Vector& w0,
                                        const ReferenceOptions& options) {
  const auto value_at = [&](const Vector& w) { return objective(losses, w, reg, smoothing, false).value; };
  double lip = 1.0;
  if (smoothing) lip = std::max(losses.max_row_norm_sq(), 1e-12) / smoothing->mu + reg.lambda;

  ReferenceResult res;
  Vector x = w0, y = w0;
  double t = 1.0;
  for (res.iters = 0; res.iters < options.max_iters; ++res.iters) {
    const ObjectiveValue oy = objective(losses, y, reg, smoothing, true);
    const double gnorm2 = oy.gradient.squaredNorm();
    if (std::sqrt(gnorm2) <= options.grad_tol) {
      x = y;
      break;
    }
    Vector xn;
    double fn = 0.0;
    // Backtracking on the sufficient-decrease condition of a 1/L step.
    for (int tries = 0;; ++tries) {
      xn = y - oy.gradient / lip;
      fn = value_at(xn);
      if (fn <= oy.value - 0.5 * gnorm2 / lip + 1e-15 * std::abs(oy.value) || tries > 60) break;
      lip *= 2.0;
    }
    if (!std::isfinite(fn)) throw DivergenceError("reference solver produced a non-finite objective");
    if (oy.gradient.dot(xn - x) > 0.0) {
      // Momentum points uphill: restart from the new point.
      t = 1.0;
      y = xn;
    } else {
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = xn + ((t - 1.0) / tn) * (xn - x);
      t = tn;
    }
    x = std::move(xn);
    lip *= 0.95;
  }
  const ObjectiveValue ox = objective(losses, x, reg, smoothing, true);
  res.w = std::move(x);
  res.value = ox.value;
  res.grad_norm = ox.gradient.norm();
  return res;
}

}  // namespace casimir
