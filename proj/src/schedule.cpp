#include "casimir/schedule.hpp"

#include <cmath>

#include "casimir/errors.hpp"

namespace casimir {

const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::sc_const: return "sc-const";
    case ScheduleKind::sc_adaptive: return "sc-adaptive";
    case ScheduleKind::nonsc_const: return "nonsc-const";
    case ScheduleKind::nonsc_adaptive: return "nonsc-adaptive";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(const std::string& name) {
  if (name == "sc-const") return ScheduleKind::sc_const;
  if (name == "sc-adaptive") return ScheduleKind::sc_adaptive;
  if (name == "nonsc-const") return ScheduleKind::nonsc_const;
  if (name == "nonsc-adaptive") return ScheduleKind::nonsc_adaptive;
  throw ConfigError("unknown schedule '" + name + "'");
}

CasimirSchedule CasimirSchedule::make(const ScheduleParams& p) {
  const bool strongly_convex = p.kind == ScheduleKind::sc_const || p.kind == ScheduleKind::sc_adaptive;
  if (strongly_convex && !(p.lambda > 0.0))
    throw ConfigError(std::string(to_string(p.kind)) + " schedule requires lambda > 0");
  if (p.lambda < 0.0) throw ConfigError("lambda must be non-negative");
  if (!(p.d_omega > 0.0) || !(p.a_omega > 0.0) || p.n == 0)
    throw ConfigError("schedule needs positive A, D and n");
  if (p.epsilon && !(*p.epsilon > 0.0)) throw ConfigError("epsilon must be positive");

  CasimirSchedule s;
  s.kind_ = p.kind;
  s.lambda_ = p.lambda;
  s.d_omega_ = p.d_omega;
  s.mu_ = p.mu;
  const double n = static_cast<double>(p.n);

  switch (p.kind) {
    case ScheduleKind::sc_const: {
      if (p.epsilon) s.mu_ = *p.epsilon / (10.0 * p.d_omega);
      const double ratio = p.a_omega / (s.mu_ * n);
      s.kappa_ = p.kappa ? *p.kappa : (ratio > 4.0 * p.lambda ? ratio - p.lambda : p.lambda);
      break;
    }
    case ScheduleKind::sc_adaptive:
      s.kappa_ = p.kappa ? *p.kappa : p.lambda;
      break;
    case ScheduleKind::nonsc_const:
      if (p.epsilon) s.mu_ = *p.epsilon / (20.0 * p.d_omega);
      s.kappa_ = p.kappa ? *p.kappa : p.a_omega / (s.mu_ * (n + 1.0));
      break;
    case ScheduleKind::nonsc_adaptive:
      s.kappa_ = p.kappa ? *p.kappa : p.a_omega / (s.mu_ * (n + 1.0));
      break;
  }
  if (!(s.mu_ > 0.0) || !std::isfinite(s.mu_)) throw ConfigError("schedule mu must be positive");
  if (!(s.kappa_ > 0.0) || !std::isfinite(s.kappa_)) throw ConfigError("schedule kappa must be positive");

  if (strongly_convex) {
    s.q_ = p.lambda / (p.lambda + s.kappa_);
    s.alpha0_ = std::sqrt(s.q_);
  } else {
    s.q_ = 0.0;
    s.alpha0_ = (std::sqrt(5.0) - 1.0) / 2.0;
  }
  return s;
}

double CasimirSchedule::mu(std::size_t k) const {
  switch (kind_) {
    case ScheduleKind::sc_adaptive:
      return mu_ * std::pow(1.0 - std::sqrt(q_) / 2.0, static_cast<double>(k) / 2.0);
    case ScheduleKind::nonsc_adaptive:
      return mu_ / static_cast<double>(k);
    default:
      return mu_;
  }
}

double CasimirSchedule::kappa(std::size_t k) const {
  return kind_ == ScheduleKind::nonsc_adaptive ? kappa_ * static_cast<double>(k) : kappa_;
}

double CasimirSchedule::delta(std::size_t k) const {
  if (kind_ == ScheduleKind::sc_const || kind_ == ScheduleKind::sc_adaptive) {
    const double sq = std::sqrt(q_);
    return sq / (2.0 - sq);
  }
  const double k1 = static_cast<double>(k) + 1.0;
  return 1.0 / (k1 * k1);
}

double alpha_update(double alpha_prev, double kappa_k, double kappa_next, double lambda) {
  const double a2 = alpha_prev * alpha_prev * (kappa_k + lambda);
  const double quad = kappa_next + lambda;
  const double lin = a2 - lambda;
  const double disc = std::sqrt(lin * lin + 4.0 * quad * a2);
  // Two algebraically equal forms of the positive root; pick the one without
  // cancellation.
  return lin >= 0.0 ? 2.0 * a2 / (lin + disc) : (disc - lin) / (2.0 * quad);
}

double beta_coeff(double alpha_prev, double alpha, double kappa_k, double kappa_next, double lambda) {
  const double num = alpha_prev * (1.0 - alpha_prev) * (kappa_k + lambda);
  const double den = alpha_prev * alpha_prev * (kappa_k + lambda) + alpha * (kappa_next + lambda);
  return num / den;
}

}  // namespace casimir
