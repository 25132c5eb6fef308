#include <doctest.h>

#include <cmath>

#include "casimir/casimir.hpp"
#include "casimir/errors.hpp"
#include "casimir/features.hpp"
#include "casimir/proxlinear.hpp"
#include "casimir/quadratic_model.hpp"
#include "casimir/synth.hpp"

using namespace casimir;

namespace {

// One example, one parameter: phi(0; w) = 0, phi(1; w) = w + w^2 / 2, gold 0.
// The hinge is max(0, 1 + w + w^2 / 2).
QuadraticScoreModel one_dim_toy() {
  QuadraticScoreModel::Example e;
  e.a = {Vector::Zero(1), Vector::Ones(1)};
  e.q = {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)};
  e.gold = 0;
  return QuadraticScoreModel(1, {e});
}

TaggedDataset tiny_tagging(std::uint64_t seed) {
  SynthConfig sc;
  sc.seed = seed;
  sc.n = 12;
  sc.p = 4;
  sc.num_tags = 3;
  sc.vocab = 10;
  return synth_chain_dataset(sc);
}

}  // namespace

TEST_CASE("prox_gradient matches the hand-solved one-dimensional step") {
  const QuadraticScoreModel toy = one_dim_toy();
  const Vector w = Vector::Constant(1, 0.5);
  // Linearization at 0.5: 1.625 + 1.5 (v - 0.5). With eta = 0.1 the minimizer
  // v = 0.35 stays on the active piece.
  const ProxGradient small = prox_gradient(toy, 0.0, w, 0.1);
  CHECK(small.w_plus(0) == doctest::Approx(0.35).epsilon(1e-8));
  CHECK(small.norm == doctest::Approx(1.5).epsilon(1e-7));
  CHECK(small.gap <= 1e-10);
  // With eta = 2 it stops at the kink v = 0.5 - 1.625 / 1.5.
  const ProxGradient big = prox_gradient(toy, 0.0, w, 2.0);
  const double kink = 0.5 - 1.625 / 1.5;
  CHECK(big.w_plus(0) == doctest::Approx(kink).epsilon(1e-8));
  CHECK(big.norm == doctest::Approx((0.5 - kink) / 2.0).epsilon(1e-7));
  // rho = (w - w_plus) / eta by definition.
  CHECK(big.rho(0) == doctest::Approx((w(0) - big.w_plus(0)) / 2.0).epsilon(1e-14));
  CHECK(big.model_value == doctest::Approx(prox_model_value(toy, 0.0, w, 2.0, big.w_plus)).epsilon(1e-12));
  CHECK_THROWS_AS(prox_gradient(toy, 0.0, w, 0.0), InvalidInput);
}

TEST_CASE("prox_gradient vanishes at the optimum of a convex linear model") {
  const TaggedDataset data = tiny_tagging(5);
  const LinearChainModel model(FeatureMap(data.label_alphabet.size(), data.num_attributes, FeatureConfig{8, 0, 1}),
                               data);
  const double lambda = 0.1;
  // Exact proximal point iterations contract by 1 / (1 + eta lambda).
  Vector w = Vector::Zero(static_cast<Eigen::Index>(model.dim()));
  ProxGradient pg;
  for (int it = 0; it < 6; ++it) {
    pg = prox_gradient(model, lambda, w, 1000.0);
    w = pg.w_plus;
  }
  CHECK(prox_gradient(model, lambda, w, 1000.0).norm <= 1e-6);
  CHECK(prox_gradient(model, lambda, w, 1.0).norm <= 1e-6);
}

TEST_CASE("proxlinear_run with no outer iterations returns w0") {
  const QuadraticScoreModel toy = QuadraticScoreModel::random(3, 10, 2, 2);
  ProxLinearConfig cfg;
  cfg.outer_iters = 0;
  const Vector w0 = Vector::Constant(2, 0.3);
  const ProxLinearResult r = proxlinear_run(toy, 0.1, cfg, w0);
  CHECK(r.w == w0);
  CHECK(r.trace.size() == 1);
}

TEST_CASE("proxlinear_run trace is non-increasing") {
  const QuadraticScoreModel toy = QuadraticScoreModel::random(4, 30, 3, 3, 1.0, 0.5);
  ProxLinearConfig cfg;
  cfg.eta = 1.0 / toy.smoothness();
  cfg.mu = 0.5;
  cfg.outer_iters = 12;
  cfg.smoother = SmootherKind::entropy;
  cfg.diagnostics = true;
  const ProxLinearResult r = proxlinear_run(toy, 0.05, cfg, Vector::Constant(3, 1.0));
  REQUIRE(r.trace.size() == 13);
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].objective <= r.trace[k - 1].objective);
    CHECK(r.trace[k].eps == doctest::Approx(cfg.eps0 / static_cast<double>(k)));
    CHECK(r.trace[k].oracle_calls > r.trace[k - 1].oracle_calls);
    CHECK(std::isfinite(r.trace[k].prox_grad_norm));
    CHECK(r.trace[k].subproblem_gap >= -1e-9);
  }
  CHECK(r.trace.back().objective < r.trace.front().objective);
  CHECK(r.trace.back().prox_grad_norm < r.trace.front().prox_grad_norm);
  CHECK(std::isnan(proxlinear_run(toy, 0.05, ProxLinearConfig{}, Vector::Zero(3)).trace[1].prox_grad_norm));
}

TEST_CASE("upper-model check holds when eta is at most 1/L") {
  const QuadraticScoreModel toy = QuadraticScoreModel::random(5, 20, 2, 2, 1.0, 0.5);
  ProxLinearConfig cfg;
  cfg.eta = 1.0 / toy.smoothness();
  cfg.outer_iters = 8;
  cfg.accept_always = true;
  const ProxLinearResult r = proxlinear_run(toy, 0.1, cfg, Vector::Constant(2, -1.0));
  for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k].model_excess <= r.trace[k].prox_term + 1e-12);
}

TEST_CASE("affine scores: first prox-linear iterate equals a Casimir run on the proximal subproblem") {
  const TaggedDataset data = tiny_tagging(6);
  const LinearChainModel model(FeatureMap(data.label_alphabet.size(), data.num_attributes, FeatureConfig{8, 0, 1}),
                               data);
  const double lambda = 0.05;
  ProxLinearConfig cfg;
  cfg.eta = 2.0;
  cfg.mu = 0.4;
  cfg.outer_iters = 1;
  cfg.accept_always = true;
  cfg.seed = 17;
  const Vector w0 = Vector::Constant(static_cast<Eigen::Index>(model.dim()), 0.01);
  const ProxLinearResult pl = proxlinear_run(model, lambda, cfg, w0);

  const HingeLosses losses(model);
  const double lam = lambda + 1.0 / cfg.eta;
  CasimirConfig cc;
  cc.schedule.kind = ScheduleKind::sc_const;
  cc.schedule.mu = cfg.mu;
  cc.smoother = cfg.smoother;
  cc.topk = cfg.topk;
  cc.outer_iters = cfg.inner_iters;
  Rng seeds(cfg.seed);
  cc.seed = seeds();
  const RunResult c = casimir_run(losses, Regularizer{lam, Vector(w0 / (cfg.eta * lam))}, cc, w0);
  CHECK((pl.w - c.w).norm() <= 1e-9 * (1.0 + c.w.norm()));
}

TEST_CASE("proxlinear_run is reproducible") {
  const QuadraticScoreModel toy = QuadraticScoreModel::random(7, 15, 2, 3);
  ProxLinearConfig cfg;
  cfg.outer_iters = 4;
  cfg.seed = 99;
  const ProxLinearResult a = proxlinear_run(toy, 0.1, cfg, Vector::Ones(2));
  const ProxLinearResult b = proxlinear_run(toy, 0.1, cfg, Vector::Ones(2));
  CHECK(a.w == b.w);
  for (std::size_t k = 0; k < a.trace.size(); ++k) CHECK(a.trace[k].objective == b.trace[k].objective);
}
