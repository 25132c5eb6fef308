#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace casimir {

enum class ScheduleKind { sc_const, sc_adaptive, nonsc_const, nonsc_adaptive };

const char* to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& name);

struct ScheduleParams {
  ScheduleKind kind = ScheduleKind::sc_const;
  double lambda = 0.0;
  // Base smoothing; replaced by the epsilon rule when epsilon is set.
  double mu = 1.0;
  // Base kappa; when empty it is derived from a_omega as the kind prescribes.
  std::optional<double> kappa;
  // Target accuracy; when set, mu = epsilon / (10 D) for sc-const and
  // epsilon / (20 D) for nonsc-const, and kappa follows from mu.
  std::optional<double> epsilon;
  std::size_t n = 1;
  // Smoothness numerator A (max squared row norm) and smoother bound D.
  double a_omega = 1.0;
  double d_omega = 0.5;
};

// Per-iteration parameters (mu_k, kappa_k, delta_k) for k >= 1 and the seed
// alpha_0 of the momentum recursion.
class CasimirSchedule {
 public:
  // Throws ConfigError for a strongly convex kind with lambda = 0 or for
  // non-positive parameters.
  static CasimirSchedule make(const ScheduleParams& params);

  ScheduleKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double base_mu() const { return mu_; }
  double base_kappa() const { return kappa_; }
  double d_omega() const { return d_omega_; }
  // lambda / (lambda + kappa) for the constant-kappa kinds, 0 otherwise.
  double q() const { return q_; }
  double alpha0() const { return alpha0_; }

  double mu(std::size_t k) const;
  double kappa(std::size_t k) const;
  double delta(std::size_t k) const;

 private:
  ScheduleKind kind_ = ScheduleKind::sc_const;
  double lambda_ = 0.0, mu_ = 1.0, kappa_ = 1.0, d_omega_ = 0.5, q_ = 0.0, alpha0_ = 0.5;
};

// Positive root of a^2 (kappa_next + lambda) = (1 - a) alpha_prev^2 (kappa_k + lambda) + a lambda.
double alpha_update(double alpha_prev, double kappa_k, double kappa_next, double lambda);

// Extrapolation weight in z_k = w_k + beta (w_k - w_{k-1}).
double beta_coeff(double alpha_prev, double alpha, double kappa_k, double kappa_next, double lambda);

}  // namespace casimir
