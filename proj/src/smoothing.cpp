#include "casimir/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/graph_model.hpp"

namespace casimir {

const char* to_string(SmootherKind kind) {
  switch (kind) {
    case SmootherKind::entropy: return "entropy";
    case SmootherKind::l2: return "l2";
    case SmootherKind::topk_l2: return "topk_l2";
  }
  return "?";
}

SmootherKind parse_smoother_kind(const std::string& name) {
  if (name == "entropy") return SmootherKind::entropy;
  if (name == "l2") return SmootherKind::l2;
  if (name == "topk_l2" || name == "topk") return SmootherKind::topk_l2;
  throw ConfigError("unknown smoother '" + name + "'");
}

void SmoothingConfig::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidInput("smoothing mu must be positive");
  if (k < 1) throw InvalidInput("top-K width must be at least 1");
}

namespace {

void require_nonempty(const Eigen::VectorXd& z) {
  if (z.size() == 0) throw InvalidInput("empty score vector");
}

void require_mu(double mu) {
  if (!(mu > 0.0)) throw InvalidInput("mu must be positive");
}

// Finite entries sorted non-increasing.
std::vector<double> sorted_finite(const Eigen::VectorXd& z) {
  std::vector<double> s;
  s.reserve(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (!is_neg_inf(z(i))) s.push_back(z(i));
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

}  // namespace

Eigen::VectorXd project_simplex(const Eigen::VectorXd& z) {
  require_nonempty(z);
  const std::vector<double> s = sorted_finite(z);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(z.size());
  if (s.empty()) {
    u.setConstant(1.0 / static_cast<double>(z.size()));
    return u;
  }
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    cumsum += s[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (s[j] - t > 0.0) theta = t;
  }
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (!is_neg_inf(z(i))) u(i) = std::max(z(i) - theta, 0.0);
  // Renormalize away the rounding in theta.
  u /= u.sum();
  return u;
}

std::size_t projection_sparsity(const Eigen::VectorXd& z, double mu) {
  require_nonempty(z);
  require_mu(mu);
  const std::vector<double> s = sorted_finite(z);
  if (s.empty()) return static_cast<std::size_t>(z.size());
  double prefix = 0.0;
  for (std::size_t k = 1; k <= s.size(); ++k) {
    prefix += s[k - 1];
    const double lower = prefix - static_cast<double>(k) * s[k - 1];
    const double upper = k < s.size() ? prefix - static_cast<double>(k) * s[k]
                                      : std::numeric_limits<double>::infinity();
    if (lower < mu && mu <= upper) return k;
  }
  return s.size();
}

SmoothedMaxResult entropy_smoothed_max(const Eigen::VectorXd& z, double mu) {
  require_nonempty(z);
  require_mu(mu);
  SmoothedMaxResult r;
  r.weights = Eigen::VectorXd::Zero(z.size());
  const double zmax = z.maxCoeff();
  if (is_neg_inf(zmax)) {
    r.value = zmax;
    r.weights.setConstant(1.0 / static_cast<double>(z.size()));
    return r;
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (is_neg_inf(z(i))) continue;
    r.weights(i) = std::exp((z(i) - zmax) / mu);
    sum += r.weights(i);
  }
  r.weights /= sum;
  r.value = zmax + mu * std::log(sum);
  return r;
}

namespace {

// <z,u> - (mu/2)|u|^2 + mu/2 over the support of u.
double l2_value(const Eigen::VectorXd& z, const Eigen::VectorXd& u, double mu) {
  double lin = 0.0, sq = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (u(i) <= 0.0) continue;
    lin += z(i) * u(i);
    sq += u(i) * u(i);
  }
  return lin - 0.5 * mu * sq + 0.5 * mu;
}

}  // namespace

SmoothedMaxResult l2_smoothed_max(const Eigen::VectorXd& z, double mu) {
  require_nonempty(z);
  require_mu(mu);
  SmoothedMaxResult r;
  Eigen::VectorXd scaled(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) scaled(i) = is_neg_inf(z(i)) ? kNegInf : z(i) / mu;
  r.weights = project_simplex(scaled);
  if (is_neg_inf(z.maxCoeff())) {
    r.value = z.maxCoeff();
    return r;
  }
  r.value = l2_value(z, r.weights, mu);
  return r;
}

SmoothedMaxResult topk_surrogate(const Eigen::VectorXd& z_topk, double mu) {
  require_nonempty(z_topk);
  for (Eigen::Index i = 1; i < z_topk.size(); ++i)
    if (z_topk(i) > z_topk(i - 1)) throw InvalidInput("top-K scores must be non-increasing");
  return l2_smoothed_max(z_topk, mu);
}

bool topk_exactness_holds(const Eigen::VectorXd& z, double mu) {
  if (z.size() < 2) throw InvalidInput("exactness test needs K+1 >= 2 scores");
  for (Eigen::Index i = 1; i < z.size(); ++i)
    if (z(i) > z(i - 1)) throw InvalidInput("scores must be non-increasing");
  const Eigen::Index k = z.size() - 1;
  if (is_neg_inf(z(k))) return true;
  double gap = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) gap += z(i) - z(k);
  return mu <= gap;
}

double smoother_diameter(SmootherKind kind, double max_outputs) {
  if (kind == SmootherKind::entropy) return std::log(std::max(max_outputs, 1.0));
  return 0.5;
}

}  // namespace casimir
