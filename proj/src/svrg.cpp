#include "casimir/svrg.hpp"

#include <cmath>
#include <exception>
#include <string>
#include <vector>

#include "casimir/errors.hpp"

namespace casimir {

void Subproblem::add_quadratic_gradient(const Vector& w, Vector& grad) const {
  reg.add_gradient(w, 1.0, grad);
  if (kappa != 0.0) grad += kappa * (w - prox_center);
}

double Subproblem::quadratic_value(const Vector& w) const {
  double v = reg.value(w);
  if (kappa != 0.0) v += 0.5 * kappa * (w - prox_center).squaredNorm();
  return v;
}

namespace {

struct Anchor {
  std::vector<OracleResult> occupancy;
  Vector mean_grad;  // (1/n) sum_i grad f_i at the anchor, without quadratics
};

Anchor take_anchor(const Subproblem& sub, const Vector& w, OracleCounter& counter) {
  const ComponentLosses& losses = *sub.losses;
  const std::size_t n = losses.size();
  Anchor a;
  a.occupancy.resize(n);
  a.mean_grad = Vector::Zero(w.size());
  std::vector<Vector> bufs(n);
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      a.occupancy[i] = losses.oracle(i, w, sub.smoothing);
      bufs[i] = Vector::Zero(w.size());
      losses.add_gradient(i, w, a.occupancy[i], 1.0, bufs[i]);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  // Fixed-order reduction keeps the anchor independent of the thread count.
  for (std::size_t i = 0; i < n; ++i) {
    a.mean_grad += bufs[i];
    if (!std::isfinite(a.occupancy[i].value)) throw DivergenceError("non-finite loss at SVRG anchor");
  }
  a.mean_grad /= static_cast<double>(n);
  counter.anchor_calls += n;
  return a;
}

}  // namespace

SvrgResult svrg_solve(const Subproblem& sub, const Vector& w0, const InnerSolverBudget& budget, double step,
                      Rng& rng, OracleCounter& counter, const EpochCallback& on_epoch) {
  if (sub.losses == nullptr) throw InvalidInput("subproblem has no losses");
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidInput("SVRG step must be positive");
  const ComponentLosses& losses = *sub.losses;
  const std::size_t n = losses.size();
  if (n == 0) throw InvalidInput("SVRG over an empty dataset");
  const bool fixed = budget.mode == InnerSolverBudget::Mode::fixed_iterations;
  const std::size_t total_steps = fixed ? (budget.t_budget == 0 ? n : budget.t_budget) : 0;

  SvrgResult r;
  Vector anchor_w = w0;
  Vector w(w0.size()), sum(w0.size()), g(w0.size());
  while (true) {
    const Anchor anchor = take_anchor(sub, anchor_w, counter);
    if (!fixed && r.epochs >= 1) {
      Vector full = anchor.mean_grad;
      sub.add_quadratic_gradient(anchor_w, full);
      const double rhs = (sub.reg.lambda + sub.kappa) * budget.delta * sub.kappa *
                         (anchor_w - sub.prox_center).squaredNorm();
      // At a minimizer both sides are roundoff; the floor scales with the
      // magnitude of the terms that cancel in the full gradient.
      const double floor = 1e-13 * (1.0 + anchor.mean_grad.norm() + (full - anchor.mean_grad).norm());
      if (full.squaredNorm() <= rhs || full.norm() <= floor) {
        r.converged = true;
        break;
      }
      if (r.epochs >= budget.max_epochs) break;
    }

    const std::size_t m = fixed ? std::min(n, total_steps - r.steps) : n;
    w = anchor_w;
    sum.setZero();
    for (std::size_t t = 0; t < m; ++t) {
      const std::size_t i = sample_index(rng, n);
      const OracleResult o = losses.oracle(i, w, sub.smoothing);
      ++counter.oracle_calls;
      if (!std::isfinite(o.value)) throw DivergenceError("non-finite loss in SVRG step " + std::to_string(r.steps));
      g = anchor.mean_grad;
      losses.add_gradient(i, w, o, 1.0, g);
      losses.add_gradient(i, anchor_w, anchor.occupancy[i], -1.0, g);
      sub.add_quadratic_gradient(w, g);
      w -= step * g;
      sum += w;
      ++r.steps;
    }
    anchor_w = sum / static_cast<double>(m);
    if (!anchor_w.allFinite()) throw DivergenceError("SVRG iterate became non-finite");
    ++r.epochs;
    if (on_epoch) on_epoch(r.epochs, anchor_w);
    if (fixed && r.steps >= total_steps) break;
  }
  r.w = std::move(anchor_w);
  return r;
}

}  // namespace casimir
