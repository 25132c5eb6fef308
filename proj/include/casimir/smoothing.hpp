#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Dense>

namespace casimir {

enum class SmootherKind { entropy, l2, topk_l2 };

const char* to_string(SmootherKind kind);
// Accepts "entropy", "l2", "topk_l2" (also "topk"). Throws ConfigError.
SmootherKind parse_smoother_kind(const std::string& name);

struct SmoothingConfig {
  SmootherKind kind = SmootherKind::topk_l2;
  double mu = 1.0;
  std::size_t k = 5;

  void validate() const;
};

// weights is a probability vector aligned with the input scores.
struct SmoothedMaxResult {
  double value = 0.0;
  Eigen::VectorXd weights;
};

// Euclidean projection onto the probability simplex (sort and threshold).
// Entries at the -inf sentinel receive zero mass.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& z);

// Number of non-zeros of project_simplex(z / mu); the smallest valid k when
// ties make several values admissible.
std::size_t projection_sparsity(const Eigen::VectorXd& z, double mu);

// mu * log sum exp(z / mu), with softmax weights. Max-shifted.
SmoothedMaxResult entropy_smoothed_max(const Eigen::VectorXd& z, double mu);

// max over the simplex of <z,u> - (mu/2)(|u|^2 - 1).
SmoothedMaxResult l2_smoothed_max(const Eigen::VectorXd& z, double mu);

// l2 smoothing restricted to the K best scores, which must be non-increasing.
SmoothedMaxResult topk_surrogate(const Eigen::VectorXd& z_topk, double mu);

// z holds the K+1 best scores, non-increasing. True iff
// mu <= sum_{i<=K} (z_i - z_{K+1}), in which case the top-K surrogate
// coincides with full l2 smoothing.
bool topk_exactness_holds(const Eigen::VectorXd& z_topk_plus1, double mu);

// Bound D on the smoother over a simplex with max_outputs vertices:
// log(max_outputs) for entropy, 1/2 for the l2 variants.
double smoother_diameter(SmootherKind kind, double max_outputs);

}  // namespace casimir
