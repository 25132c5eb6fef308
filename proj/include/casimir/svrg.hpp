#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "casimir/loss.hpp"
#include "casimir/random.hpp"
#include "casimir/smoothing.hpp"

namespace casimir {

struct InnerSolverBudget {
  enum class Mode { relative_accuracy, fixed_iterations };
  Mode mode = Mode::fixed_iterations;
  // Relative accuracy target in [0, 1).
  double delta = 0.0;
  // Component steps in fixed mode; 0 means n.
  std::size_t t_budget = 0;
  // Hard cap on epochs in relative-accuracy mode.
  std::size_t max_epochs = 50;
};

// Inference calls made by stochastic steps, and those made by full passes
// at SVRG anchors, kept apart.
struct OracleCounter {
  std::size_t oracle_calls = 0;
  std::size_t anchor_calls = 0;

  std::size_t total() const { return oracle_calls + anchor_calls; }
};

// min_w (1/n) sum_i f_i(w) + reg(w) + (kappa/2)|w - prox_center|^2 with the
// f_i smoothed by `smoothing` (or unsmoothed when empty).
struct Subproblem {
  const ComponentLosses* losses = nullptr;
  Regularizer reg;
  std::optional<SmoothingConfig> smoothing;
  double kappa = 0.0;
  Vector prox_center;

  // Adds the gradient of reg and of the proximal term at w.
  void add_quadratic_gradient(const Vector& w, Vector& grad) const;
  double quadratic_value(const Vector& w) const;
};

struct SvrgResult {
  Vector w;
  std::size_t epochs = 0;
  std::size_t steps = 0;
  // Relative-accuracy criterion met (always false in fixed mode).
  bool converged = false;
};

// Called after each epoch with (epoch index from 1, averaged iterate).
using EpochCallback = std::function<void(std::size_t, const Vector&)>;

// SVRG: epochs of n uniformly sampled steps, each anchored at a full
// gradient taken at the previous epoch's averaged iterate. At least one
// epoch always runs. The stopping rule in relative-accuracy mode is
// |grad F(w)|^2 <= (lambda + kappa) delta kappa |w - prox_center|^2, checked
// at each anchor. Anchor occupancies are cached, so a step costs one oracle
// call. Throws InvalidInput for step <= 0 and DivergenceError on non-finite
// iterates.
SvrgResult svrg_solve(const Subproblem& sub, const Vector& w0, const InnerSolverBudget& budget,
                      double step, Rng& rng, OracleCounter& counter,
                      const EpochCallback& on_epoch = {});

}  // namespace casimir
