#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "casimir/loss.hpp"

namespace casimir {

// Single-node score model phi(y; w) = a_y . w + (1/2) w' Q_y w. With
// indefinite Q_y the hinge is non-convex but smooth in w: a small testbed
// for prox-linear methods.
class QuadraticScoreModel final : public ScoreModel {
 public:
  struct Example {
    std::vector<Vector> a;
    std::vector<Eigen::MatrixXd> q;  // symmetric
    Label gold = 0;
  };

  QuadraticScoreModel(std::size_t dim, std::vector<Example> examples);

  // Random instance: entries of a_y ~ N(0, scale), Q_y symmetric with
  // N(0, curvature) entries.
  static QuadraticScoreModel random(std::uint64_t seed, std::size_t n, std::size_t dim,
                                    std::size_t labels, double scale = 1.0, double curvature = 0.5);

  std::size_t dim() const override { return dim_; }
  std::size_t size() const override { return examples_.size(); }
  bool is_linear() const override { return false; }
  const Labeling& gold(std::size_t i) const override { return golds_[i]; }
  const LabelDomain& domain(std::size_t i) const override { return domains_[i]; }

  PotentialTable potentials(std::size_t i, const Vector& w) const override;
  PotentialTable directional_potentials(std::size_t i, const Vector& w, const Vector& dir) const override;
  void add_occupancy_gradient(std::size_t i, const Vector& w, const OracleResult& occupancy, double scale,
                              Vector& grad) const override;
  void add_labeling_gradient(std::size_t i, const Vector& w, const Labeling& y, double scale,
                             Vector& grad) const override;
  double row_norm_sq_bound(std::size_t i) const override;
  double row_norm_sq_at(std::size_t i, const Vector& w) const override;

  // max_y of the spectral norm of Q_y - Q_gold over all examples: the
  // Lipschitz constant of the Jacobian of the augmented score map.
  double smoothness() const;
  const Example& example(std::size_t i) const { return examples_[i]; }

 private:
  std::size_t dim_;
  std::vector<Example> examples_;
  std::vector<Labeling> golds_;
  std::vector<LabelDomain> domains_;

  Vector grad_phi(std::size_t i, Label y, const Vector& w) const;
};

}  // namespace casimir
