#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "casimir/loss.hpp"
#include "casimir/schedule.hpp"
#include "casimir/smoothing.hpp"
#include "casimir/svrg.hpp"

namespace casimir {

enum class WarmStart { prox_center, prev_iterate, extrapolation };

const char* to_string(WarmStart ws);
WarmStart parse_warm_start(const std::string& name);

struct TraceRow {
  std::size_t iter = 0;
  // Non-smooth objective F(w) and its smoothed counterpart at the iteration's mu.
  double objective = 0.0;
  double smoothed_objective = 0.0;
  // Cumulative inference calls from stochastic steps and from full passes.
  std::size_t oracle_calls = 0;
  std::size_t anchor_calls = 0;
  double wall_ms = 0.0;
  // |w_k - z_{k-1}|; zero for methods without a prox center.
  double prox_distance = 0.0;
};

using OptimizerTrace = std::vector<TraceRow>;
// Receives each trace row with the iterate it describes.
using RowCallback = std::function<void(const TraceRow&, const Vector&)>;

struct RunResult {
  Vector w;
  OptimizerTrace trace;
  // Smoothness numerator A used for step and kappa selection.
  double a_omega = 0.0;
};

struct CasimirConfig {
  // lambda and n are taken from the regularizer and the losses; a_omega is
  // filled in from the losses unless `lipschitz` is set.
  ScheduleParams schedule;
  SmootherKind smoother = SmootherKind::topk_l2;
  std::size_t topk = 5;
  WarmStart warm_start = WarmStart::prox_center;
  InnerSolverBudget inner;
  // L of grad F_{mu omega} at the base mu. Overrides A = L * mu for kappa
  // selection and the default step.
  std::optional<double> lipschitz;
  // Fixed SVRG step; defaults to 1 / (A / mu_k + lambda + kappa_k).
  std::optional<double> step;
  std::size_t outer_iters = 10;
  std::uint64_t seed = 0;
  // Evaluate the smoothed objective for the trace (one extra pass per row).
  bool trace_smoothed = true;
};

// Accelerated inexact proximal point on the smoothed objective. Row 0 holds
// the start point; rows 1..K follow each outer iteration. Divergence in an
// inner solve is rethrown with the outer index in its message.
RunResult casimir_run(const ComponentLosses& losses, const Regularizer& reg, const CasimirConfig& config,
                      const Vector& w0, const RowCallback& on_row = {});

struct SgdConfig {
  double gamma0 = 1.0;
  double t0 = 1.0;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
};

// Stochastic subgradient on the non-smooth objective with
// gamma_t = gamma0 / (1 + floor(t / t0)); one row per epoch plus row 0.
RunResult sgd_run(const ComponentLosses& losses, const Regularizer& reg, const SgdConfig& config,
                  const Vector& w0, const RowCallback& on_row = {});

struct SvrgRunConfig {
  SmoothingConfig smoothing;
  std::optional<double> step;  // default 1 / (A / mu + lambda)
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
};

// Plain SVRG on the smoothed objective with constant smoothing; one row per
// epoch plus row 0.
RunResult svrg_run(const ComponentLosses& losses, const Regularizer& reg, const SvrgRunConfig& config,
                   const Vector& w0, const RowCallback& on_row = {});

struct ReferenceOptions {
  std::size_t max_iters = 20000;
  double grad_tol = 1e-9;
};

struct ReferenceResult {
  Vector w;
  double value = 0.0;
  double grad_norm = 0.0;
  std::size_t iters = 0;
};

// Deterministic accelerated full-gradient descent with backtracking and
// gradient-based restart on the smoothed (or, with no smoothing, the
// non-smooth) objective. Used to produce reference optima.
ReferenceResult full_gradient_reference(const ComponentLosses& losses, const Regularizer& reg,
                                        const std::optional<SmoothingConfig>& smoothing, const Vector& w0,
                                        const ReferenceOptions& options = {});

}  // namespace casimir
