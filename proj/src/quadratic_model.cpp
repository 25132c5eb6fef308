#include "casimir/quadratic_model.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "casimir/errors.hpp"
#include "casimir/random.hpp"

namespace casimir {

QuadraticScoreModel::QuadraticScoreModel(std::size_t dim, std::vector<Example> examples)
    : dim_(dim), examples_(std::move(examples)) {
  const auto d = static_cast<Eigen::Index>(dim_);
  for (const auto& ex : examples_) {
    if (ex.a.empty() || ex.a.size() != ex.q.size()) throw InvalidInput("quadratic example needs a_y and Q_y per label");
    for (std::size_t y = 0; y < ex.a.size(); ++y)
      if (ex.a[y].size() != d || ex.q[y].rows() != d || ex.q[y].cols() != d)
        throw InvalidInput("quadratic example has wrong dimensions");
    if (ex.gold < 0 || static_cast<std::size_t>(ex.gold) >= ex.a.size())
      throw InvalidInput("gold label outside the label set");
    golds_.push_back({ex.gold});
    domains_.emplace_back(std::vector<std::size_t>{ex.a.size()});
  }
}

QuadraticScoreModel QuadraticScoreModel::random(std::uint64_t seed, std::size_t n, std::size_t dim,
                                                std::size_t labels, double scale, double curvature) {
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<Example> ex(n);
  for (auto& e : ex) {
    for (std::size_t y = 0; y < labels; ++y) {
      Vector a(d);
      for (Eigen::Index k = 0; k < d; ++k) a(k) = scale * standard_normal(rng);
      Eigen::MatrixXd m(d, d);
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) m(r, c) = curvature * standard_normal(rng);
      e.a.push_back(a);
      e.q.push_back(0.5 * (m + m.transpose()));
    }
    e.gold = static_cast<Label>(sample_index(rng, labels));
  }
  return QuadraticScoreModel(dim, std::move(ex));
}

PotentialTable QuadraticScoreModel::potentials(std::size_t i, const Vector& w) const {
  const auto& ex = examples_[i];
  PotentialTable pot = PotentialTable::zeros(TreeTopology::chain(1), domains_[i]);
  for (std::size_t y = 0; y < ex.a.size(); ++y)
    pot.node[0](static_cast<Eigen::Index>(y)) = ex.a[y].dot(w) + 0.5 * w.dot(ex.q[y] * w);
  return pot;
}

Vector QuadraticScoreModel::grad_phi(std::size_t i, Label y, const Vector& w) const {
  const auto& ex = examples_[i];
  return ex.a[static_cast<std::size_t>(y)] + ex.q[static_cast<std::size_t>(y)] * w;
}

PotentialTable QuadraticScoreModel::directional_potentials(std::size_t i, const Vector& w,
                                                           const Vector& dir) const {
  PotentialTable pot = PotentialTable::zeros(TreeTopology::chain(1), domains_[i]);
  for (std::size_t y = 0; y < examples_[i].a.size(); ++y)
    pot.node[0](static_cast<Eigen::Index>(y)) = grad_phi(i, static_cast<Label>(y), w).dot(dir);
  return pot;
}

void QuadraticScoreModel::add_occupancy_gradient(std::size_t i, const Vector& w, const OracleResult& occ,
                                                 double scale, Vector& grad) const {
  if (occ.mode == OracleMode::marginal) {
    const Vector& p = occ.node_marginals[0];
    for (Eigen::Index y = 0; y < p.size(); ++y)
      if (p(y) != 0.0) grad += (scale * p(y)) * grad_phi(i, static_cast<Label>(y), w);
    return;
  }
  for (const auto& s : occ.support)
    if (s.weight != 0.0) grad += (scale * s.weight) * grad_phi(i, s.labeling[0], w);
}

void QuadraticScoreModel::add_labeling_gradient(std::size_t i, const Vector& w, const Labeling& y,
                                                double scale, Vector& grad) const {
  grad += scale * grad_phi(i, y[0], w);
}

double QuadraticScoreModel::row_norm_sq_bound(std::size_t i) const {
  return row_norm_sq_at(i, Vector::Zero(static_cast<Eigen::Index>(dim_)));
}

double QuadraticScoreModel::row_norm_sq_at(std::size_t i, const Vector& w) const {
  const Vector g = grad_phi(i, examples_[i].gold, w);
  double a = 0.0;
  for (std::size_t y = 0; y < examples_[i].a.size(); ++y)
    a = std::max(a, (grad_phi(i, static_cast<Label>(y), w) - g).squaredNorm());
  return a;
}

double QuadraticScoreModel::smoothness() const {
  double l = 0.0;
  for (const auto& ex : examples_)
    for (std::size_t y = 0; y < ex.q.size(); ++y) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ex.q[y] - ex.q[static_cast<std::size_t>(ex.gold)]);
      l = std::max(l, es.eigenvalues().cwiseAbs().maxCoeff());
    }
  return l;
}

}  // namespace casimir
