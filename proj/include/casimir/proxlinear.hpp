#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "casimir/casimir.hpp"
#include "casimir/loss.hpp"
#include "casimir/smoothing.hpp"
#include "casimir/svrg.hpp"

namespace casimir {

struct ProxLinearConfig {
  double eta = 1.0;
  // Subproblem tolerances eps_k = eps0 / k (reported, and used by tests).
  double eps0 = 1.0;
  // Inner smoothing: mu_k = mu / k when adaptive, mu otherwise.
  double mu = 1.0;
  bool adaptive_smoothing = true;
  // L_k = k * L0 when adaptive, L0 otherwise; empty uses A / mu_k.
  std::optional<double> lipschitz0;
  SmootherKind smoother = SmootherKind::topk_l2;
  std::size_t topk = 5;
  // Casimir iterations per subproblem and the budget of each SVRG call.
  std::size_t inner_iters = 5;
  InnerSolverBudget inner_budget;
  WarmStart inner_warm_start = WarmStart::prox_center;
  // Take every candidate instead of only improving ones.
  bool accept_always = false;
  std::size_t outer_iters = 10;
  std::uint64_t seed = 0;
  // Record |rho_eta(w_k)| and the true subproblem gap; needs an exact
  // prox step by enumeration, so only for small label spaces.
  bool diagnostics = false;
  double enumeration_cap = 1e5;
};

struct ProxGradient {
  Vector rho;  // (w - w_plus) / eta
  double norm = 0.0;
  // Exact minimizer of the local model and the model's value there.
  Vector w_plus;
  double model_value = 0.0;
  // Certified duality gap of the subsolve.
  double gap = 0.0;
  std::size_t iters = 0;
};

// F_eta(v; w) = (1/n) sum_i hinge of the linearization at w, evaluated at v,
// plus (lambda/2)|v|^2 + |v - w|^2 / (2 eta).
double prox_model_value(const ScoreModel& model, double lambda, const Vector& w, double eta, const Vector& v);

// Gradient mapping at w. The local model is minimized exactly by accelerated
// projected ascent on its dual over enumerated labelings, stopping when the
// duality gap is at most `tol`. Throws InvalidInput for eta <= 0 and
// DivergenceError (with the residual gap) if max_iters is reached.
ProxGradient prox_gradient(const ScoreModel& model, double lambda, const Vector& w, double eta,
                           double tol = 1e-10, std::size_t max_iters = 200000, double cap = 1e5);

struct ProxLinearRow {
  std::size_t iter = 0;
  double objective = 0.0;  // F(w_k)
  bool accepted = true;
  double eps = 0.0;  // eps_k; zero on row 0
  std::size_t oracle_calls = 0;
  std::size_t anchor_calls = 0;
  double wall_ms = 0.0;
  // F(candidate) - F(candidate; w_{k-1}) next to |candidate - w_{k-1}|^2 / (2 eta):
  // the upper-model condition holds empirically when the first is at most the second.
  double model_excess = 0.0;
  double prox_term = 0.0;
  // Diagnostics only (NaN otherwise): |rho_eta(w_k)| and the candidate's
  // suboptimality on its subproblem.
  double prox_grad_norm = 0.0;
  double subproblem_gap = 0.0;
};

struct ProxLinearResult {
  Vector w;
  std::vector<ProxLinearRow> trace;
};

using ProxLinearCallback = std::function<void(const ProxLinearRow&, const Vector&)>;

// Inexact prox-linear outer loop with Casimir-SVRG on each linearized
// subproblem. Row 0 holds w0.
ProxLinearResult proxlinear_run(const ScoreModel& model, double lambda, const ProxLinearConfig& config,
                                const Vector& w0, const ProxLinearCallback& on_row = {});

}  // namespace casimir
