#include "casimir/loss.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "casimir/errors.hpp"
#include "casimir/oracles.hpp"

namespace casimir {

PotentialTable loss_augment(const PotentialTable& pot, const Labeling& gold) {
  if (!pot.domain.contains(gold)) throw InvalidInput("gold labeling does not match the domain");
  PotentialTable out = pot;
  for (std::size_t v = 0; v < out.num_nodes(); ++v) {
    const double g = pot.node[v](gold[v]);
    auto& t = out.node[v];
    for (Eigen::Index j = 0; j < t.size(); ++j) t(j) = t(j) - g + (j == gold[v] ? 0.0 : 1.0);
    if (const auto& par = pot.topology.parent(v)) out.edge[v].array() -= pot.edge[v](gold[v], gold[*par]);
  }
  return out;
}

OracleResult run_oracle(const PotentialTable& augmented, const std::optional<SmoothingConfig>& smoothing) {
  return smoothing ? smoothed_oracle(augmented, *smoothing) : max_oracle(augmented);
}

namespace {

ExampleLoss finish(const ScoreModel& model, std::size_t i, const Vector& at, const OracleResult& r) {
  ExampleLoss out;
  out.value = r.value;
  out.gradient = Vector::Zero(static_cast<Eigen::Index>(model.dim()));
  model.add_occupancy_gradient(i, at, r, 1.0, out.gradient);
  model.add_labeling_gradient(i, at, model.gold(i), -1.0, out.gradient);
  out.oracle_calls = 1;
  return out;
}

}  // namespace

ExampleLoss hinge(const ScoreModel& model, std::size_t i, const Vector& w) {
  const auto aug = loss_augment(model.potentials(i, w), model.gold(i));
  return finish(model, i, w, max_oracle(aug));
}

ExampleLoss smoothed_hinge(const ScoreModel& model, std::size_t i, const Vector& w,
                           const SmoothingConfig& smoothing) {
  const auto aug = loss_augment(model.potentials(i, w), model.gold(i));
  return finish(model, i, w, smoothed_oracle(aug, smoothing));
}

namespace {

PotentialTable add_tables(PotentialTable a, const PotentialTable& b) {
  for (std::size_t v = 0; v < a.num_nodes(); ++v) {
    a.node[v] += b.node[v];
    if (a.topology.parent(v)) a.edge[v] += b.edge[v];
  }
  return a;
}

}  // namespace

ExampleLoss linearized_loss(const ScoreModel& model, std::size_t i, const Vector& anchor,
                            const Vector& w, const std::optional<SmoothingConfig>& smoothing) {
  if (anchor.size() != w.size() || static_cast<std::size_t>(w.size()) != model.dim())
    throw InvalidInput("anchor and parameter dimensions differ");
  const auto local = add_tables(model.potentials(i, anchor),
                                model.directional_potentials(i, anchor, w - anchor));
  return finish(model, i, anchor, run_oracle(loss_augment(local, model.gold(i)), smoothing));
}

OracleResult HingeLosses::oracle(std::size_t i, const Vector& w,
                                 const std::optional<SmoothingConfig>& smoothing) const {
  return run_oracle(loss_augment(model_.potentials(i, w), model_.gold(i)), smoothing);
}

void HingeLosses::add_gradient(std::size_t i, const Vector& w, const OracleResult& r, double scale,
                               Vector& grad) const {
  model_.add_occupancy_gradient(i, w, r, scale, grad);
  model_.add_labeling_gradient(i, w, model_.gold(i), -scale, grad);
}

double HingeLosses::max_row_norm_sq() const {
  double a = 0.0;
  for (std::size_t i = 0; i < model_.size(); ++i) a = std::max(a, model_.row_norm_sq_bound(i));
  return a;
}

double HingeLosses::max_outputs() const {
  double m = 1.0;
  for (std::size_t i = 0; i < model_.size(); ++i) m = std::max(m, model_.domain(i).cardinality());
  return m;
}

LinearizedLosses::LinearizedLosses(const ScoreModel& model, Vector anchor)
    : model_(model), anchor_(std::move(anchor)) {
  if (static_cast<std::size_t>(anchor_.size()) != model_.dim())
    throw InvalidInput("anchor dimension differs from the model");
  base_.reserve(model_.size());
  for (std::size_t i = 0; i < model_.size(); ++i) base_.push_back(model_.potentials(i, anchor_));
}

OracleResult LinearizedLosses::oracle(std::size_t i, const Vector& w,
                                      const std::optional<SmoothingConfig>& smoothing) const {
  const auto local = add_tables(base_[i], model_.directional_potentials(i, anchor_, w - anchor_));
  return run_oracle(loss_augment(local, model_.gold(i)), smoothing);
}

void LinearizedLosses::add_gradient(std::size_t i, const Vector&, const OracleResult& r, double scale,
                                    Vector& grad) const {
  model_.add_occupancy_gradient(i, anchor_, r, scale, grad);
  model_.add_labeling_gradient(i, anchor_, model_.gold(i), -scale, grad);
}

double LinearizedLosses::max_row_norm_sq() const {
  double a = 0.0;
  for (std::size_t i = 0; i < model_.size(); ++i) a = std::max(a, model_.row_norm_sq_at(i, anchor_));
  return a;
}

double LinearizedLosses::max_outputs() const {
  double m = 1.0;
  for (std::size_t i = 0; i < model_.size(); ++i) m = std::max(m, model_.domain(i).cardinality());
  return m;
}

double Regularizer::value(const Vector& w) const {
  if (lambda == 0.0) return 0.0;
  return 0.5 * lambda * (center ? (w - *center).squaredNorm() : w.squaredNorm());
}

void Regularizer::add_gradient(const Vector& w, double scale, Vector& grad) const {
  if (lambda == 0.0) return;
  if (center)
    grad += (scale * lambda) * (w - *center);
  else
    grad += (scale * lambda) * w;
}

namespace {

// Examples per parallel block; fixed so that results do not depend on the
// thread count.
constexpr std::size_t kBlock = 32;

void check_args(const ComponentLosses& losses, const Vector& w) {
  if (losses.size() == 0) throw InvalidInput("objective over an empty dataset");
  if (static_cast<std::size_t>(w.size()) != losses.dim())
    throw InvalidInput("parameter dimension differs from the model");
}

ObjectiveValue finalize(ObjectiveValue r, const ComponentLosses& losses, const Vector& w,
                        const Regularizer& reg, bool with_gradient) {
  const double inv_n = 1.0 / static_cast<double>(losses.size());
  r.value = r.value * inv_n + reg.value(w);
  if (with_gradient) {
    r.gradient *= inv_n;
    reg.add_gradient(w, 1.0, r.gradient);
  }
  if (!std::isfinite(r.value)) throw DivergenceError("objective is not finite");
  return r;
}

}  // namespace

ObjectiveValue objective_serial(const ComponentLosses& losses, const Vector& w, const Regularizer& reg,
                                const std::optional<SmoothingConfig>& smoothing, bool with_gradient) {
  check_args(losses, w);
  const auto d = static_cast<Eigen::Index>(losses.dim());
  ObjectiveValue r;
  if (with_gradient) r.gradient = Vector::Zero(d);
  Vector buf(d);
  for (std::size_t i = 0; i < losses.size(); ++i) {
    const OracleResult o = losses.oracle(i, w, smoothing);
    r.value += o.value;
    ++r.oracle_calls;
    if (with_gradient) {
      buf.setZero();
      losses.add_gradient(i, w, o, 1.0, buf);
      r.gradient += buf;
    }
  }
  return finalize(std::move(r), losses, w, reg, with_gradient);
}

ObjectiveValue objective(const ComponentLosses& losses, const Vector& w, const Regularizer& reg,
                         const std::optional<SmoothingConfig>& smoothing, bool with_gradient) {
  check_args(losses, w);
  const std::size_t n = losses.size();
  const auto d = static_cast<Eigen::Index>(losses.dim());
  ObjectiveValue r;
  if (with_gradient) r.gradient = Vector::Zero(d);
  std::vector<double> values(kBlock);
  std::vector<Vector> bufs(with_gradient ? std::min(kBlock, n) : 0, Vector(d));
  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t count = std::min(kBlock, n - start);
    // Exceptions must not escape the parallel region; rethrow afterwards.
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < count; ++b) {
      try {
        const OracleResult o = losses.oracle(start + b, w, smoothing);
        values[b] = o.value;
        if (with_gradient) {
          bufs[b].setZero();
          losses.add_gradient(start + b, w, o, 1.0, bufs[b]);
        }
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    for (std::size_t b = 0; b < count; ++b) {
      r.value += values[b];
      if (with_gradient) r.gradient += bufs[b];
    }
    r.oracle_calls += count;
  }
  return finalize(std::move(r), losses, w, reg, with_gradient);
}

ObjectiveValue objective(const ScoreModel& model, const Vector& w, double lambda,
                         const std::optional<SmoothingConfig>& smoothing, bool with_gradient) {
  HingeLosses losses(model);
  return objective(losses, w, Regularizer{lambda, std::nullopt}, smoothing, with_gradient);
}

}  // namespace casimir
