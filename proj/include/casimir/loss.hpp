#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "casimir/graph_model.hpp"
#include "casimir/oracle_types.hpp"
#include "casimir/smoothing.hpp"

namespace casimir {

using Vector = Eigen::VectorXd;

// Per-example score function phi(x_i, y; w), decomposed over the nodes and
// edges of a fixed graph. Linear models are affine in w; smooth non-linear
// models additionally make linearization meaningful.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t size() const = 0;
  virtual bool is_linear() const = 0;
  virtual const Labeling& gold(std::size_t i) const = 0;
  virtual const LabelDomain& domain(std::size_t i) const = 0;

  // Tables of phi(x_i, . ; w).
  virtual PotentialTable potentials(std::size_t i, const Vector& w) const = 0;
  // Tables of the directional derivative of phi at w along dir.
  virtual PotentialTable directional_potentials(std::size_t i, const Vector& w,
                                                const Vector& dir) const = 0;
  // grad += scale * sum over the occupancy of grad_w phi(x_i, y; w). Marginal
  // results are weighted table-entry-wise; support results per labeling.
  virtual void add_occupancy_gradient(std::size_t i, const Vector& w, const OracleResult& occupancy,
                                      double scale, Vector& grad) const = 0;
  virtual void add_labeling_gradient(std::size_t i, const Vector& w, const Labeling& y, double scale,
                                     Vector& grad) const = 0;
  // Estimate of max_y |grad_w psi(y; w)|^2 for example i, used to set the
  // smoothness constant A / mu.
  virtual double row_norm_sq_bound(std::size_t i) const = 0;
  // The same estimate for the Jacobian at w; models whose Jacobian varies
  // with w override this.
  virtual double row_norm_sq_at(std::size_t i, const Vector& w) const {
    (void)w;
    return row_norm_sq_bound(i);
  }
};

// psi(y) = phi(y) + Hamming(gold, y) - phi(gold), applied entry-wise so that
// psi(gold) is exactly zero. Edge tables only lose the gold edge entry.
PotentialTable loss_augment(const PotentialTable& pot, const Labeling& gold);

struct ExampleLoss {
  double value = 0.0;
  Vector gradient;
  std::size_t oracle_calls = 0;
};

ExampleLoss hinge(const ScoreModel& model, std::size_t i, const Vector& w);
ExampleLoss smoothed_hinge(const ScoreModel& model, std::size_t i, const Vector& w,
                           const SmoothingConfig& smoothing);
// Convex local model of the (smoothed) hinge: potentials and gradients are
// those of phi(anchor) + J(anchor)(w - anchor). Unsmoothed when smoothing is
// empty.
ExampleLoss linearized_loss(const ScoreModel& model, std::size_t i, const Vector& anchor,
                            const Vector& w, const std::optional<SmoothingConfig>& smoothing);

// Finite family of convex component losses f_i sharing a gradient layout.
// oracle() performs one inference call; its value is f_i(w). add_gradient
// turns a stored oracle result back into grad f_i without new inference.
class ComponentLosses {
 public:
  virtual ~ComponentLosses() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  virtual OracleResult oracle(std::size_t i, const Vector& w,
                              const std::optional<SmoothingConfig>& smoothing) const = 0;
  virtual void add_gradient(std::size_t i, const Vector& w, const OracleResult& r, double scale,
                            Vector& grad) const = 0;
  // max_i of the row-norm estimate; the smoothed f_i are (A / mu)-smooth.
  virtual double max_row_norm_sq() const = 0;
  // Largest |Y| over examples (as a double), for the entropy diameter.
  virtual double max_outputs() const = 0;
};

class HingeLosses final : public ComponentLosses {
 public:
  explicit HingeLosses(const ScoreModel& model) : model_(model) {}
  std::size_t size() const override { return model_.size(); }
  std::size_t dim() const override { return model_.dim(); }
  OracleResult oracle(std::size_t i, const Vector& w,
                      const std::optional<SmoothingConfig>& smoothing) const override;
  void add_gradient(std::size_t i, const Vector& w, const OracleResult& r, double scale,
                    Vector& grad) const override;
  double max_row_norm_sq() const override;
  double max_outputs() const override;

 private:
  const ScoreModel& model_;
};

// Losses of the prox-linear local model around a fixed anchor.
class LinearizedLosses final : public ComponentLosses {
 public:
  LinearizedLosses(const ScoreModel& model, Vector anchor);
  std::size_t size() const override { return model_.size(); }
  std::size_t dim() const override { return model_.dim(); }
  OracleResult oracle(std::size_t i, const Vector& w,
                      const std::optional<SmoothingConfig>& smoothing) const override;
  void add_gradient(std::size_t i, const Vector& w, const OracleResult& r, double scale,
                    Vector& grad) const override;
  double max_row_norm_sq() const override;
  double max_outputs() const override;
  const Vector& anchor() const { return anchor_; }

 private:
  const ScoreModel& model_;
  Vector anchor_;
  std::vector<PotentialTable> base_;  // phi(anchor) per example
};

// Oracle for already-augmented tables: max when smoothing is empty.
OracleResult run_oracle(const PotentialTable& augmented, const std::optional<SmoothingConfig>& smoothing);

struct ObjectiveValue {
  double value = 0.0;
  Vector gradient;
  std::size_t oracle_calls = 0;
};

struct Regularizer {
  double lambda = 0.0;
  // Center of the quadratic; zero when empty.
  std::optional<Vector> center;

  double value(const Vector& w) const;
  void add_gradient(const Vector& w, double scale, Vector& grad) const;
};

// (1/n) sum_i f_i(w) + (lambda/2)|w - center|^2 with its gradient. Examples
// are evaluated in parallel; per-example gradients are reduced in index
// order so the result is bitwise equal to objective_serial.
ObjectiveValue objective(const ComponentLosses& losses, const Vector& w, const Regularizer& reg,
                         const std::optional<SmoothingConfig>& smoothing, bool with_gradient = true);
ObjectiveValue objective_serial(const ComponentLosses& losses, const Vector& w, const Regularizer& reg,
                                const std::optional<SmoothingConfig>& smoothing,
                                bool with_gradient = true);

// Convenience for the plain hinge objective (1/n) sum f_i + (lambda/2)|w|^2.
ObjectiveValue objective(const ScoreModel& model, const Vector& w, double lambda,
                         const std::optional<SmoothingConfig>& smoothing, bool with_gradient = true);

}  // namespace casimir
