#include "casimir/proxlinear.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "casimir/errors.hpp"
#include "casimir/random.hpp"

namespace casimir {

namespace {

// Linearized augmented scores of one example: psi(y; v) ~ b + G v, one row
// per labeling.
struct LinearBlock {
  Eigen::SparseMatrix<double, Eigen::RowMajor> g;  // feature differences are sparse
  Vector b;
};

std::vector<LinearBlock> linearize_all(const ScoreModel& model, const Vector& w, double cap) {
  const std::size_t n = model.size();
  std::vector<LinearBlock> blocks(n);
  const auto d = static_cast<Eigen::Index>(model.dim());
  for (std::size_t i = 0; i < n; ++i) {
    const PotentialTable aug = loss_augment(model.potentials(i, w), model.gold(i));
    const std::vector<ScoredLabeling> all = enumerate_scored(aug, cap);
    Vector gold_grad = Vector::Zero(d);
    model.add_labeling_gradient(i, w, model.gold(i), 1.0, gold_grad);
    LinearBlock& blk = blocks[i];
    blk.b.resize(static_cast<Eigen::Index>(all.size()));
    std::vector<Eigen::Triplet<double>> entries;
    Vector g(d);
    for (std::size_t j = 0; j < all.size(); ++j) {
      g = -gold_grad;
      model.add_labeling_gradient(i, w, all[j].labeling, 1.0, g);
      const auto r = static_cast<Eigen::Index>(j);
      for (Eigen::Index k = 0; k < d; ++k)
        if (g(k) != 0.0) entries.emplace_back(r, k, g(k));
      blk.b(r) = all[j].score - g.dot(w);
    }
    blk.g.resize(static_cast<Eigen::Index>(all.size()), d);
    blk.g.setFromTriplets(entries.begin(), entries.end());
  }
  return blocks;
}

}  // namespace

double prox_model_value(const ScoreModel& model, double lambda, const Vector& w, double eta, const Vector& v) {
  const LinearizedLosses lin(model, w);
  const double f = objective(lin, v, Regularizer{0.0, std::nullopt}, std::nullopt, false).value;
  return f + 0.5 * lambda * v.squaredNorm() + (v - w).squaredNorm() / (2.0 * eta);
}

ProxGradient prox_gradient(const ScoreModel& model, double lambda, const Vector& w, double eta, double tol,
                           std::size_t max_iters, double cap) {
  if (!(eta > 0.0)) throw InvalidInput("eta must be positive");
  const std::vector<LinearBlock> blocks = linearize_all(model, w, cap);
  const std::size_t n = blocks.size();
  if (n == 0) throw InvalidInput("prox_gradient over an empty dataset");
  const double nd = static_cast<double>(n);
  // lambda/2 |v|^2 + |v - w|^2/(2 eta) = lam/2 |v - c|^2 + const.
  const double lam = lambda + 1.0 / eta;
  const Vector c = w / (eta * lam);
  const auto d = static_cast<Eigen::Index>(model.dim());

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  for (const auto& blk : blocks) gram += Eigen::MatrixXd(blk.g.transpose() * blk.g);
  const double sigma2 = d > 0 ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
                                    .eigenvalues()
                                    .maxCoeff()
                              : 0.0;
  const double lip = std::max(sigma2, 0.0) / (nd * nd * lam);

  using Duals = std::vector<Vector>;
  const auto primal_of = [&](const Duals& u) {
    Vector v = c;
    for (std::size_t i = 0; i < n; ++i) v.noalias() -= (blocks[i].g.transpose() * u[i]) / (nd * lam);
    return v;
  };
  const auto primal_value = [&](const Vector& v) {
    double s = 0.0;
    for (const auto& blk : blocks) s += (blk.b + blk.g * v).maxCoeff();
    return s / nd + 0.5 * lam * (v - c).squaredNorm();
  };
  const auto dual_value = [&](const Duals& u, const Vector& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += u[i].dot(blocks[i].b + blocks[i].g * v);
    return s / nd + 0.5 * lam * (v - c).squaredNorm();
  };

  // Start from the best response to c.
  Duals u(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    (blocks[i].b + blocks[i].g * c).maxCoeff(&best);
    u[i] = Vector::Zero(blocks[i].b.size());
    u[i](best) = 1.0;
  }
  Vector wu = primal_of(u);
  double du = dual_value(u, wu);
  double gap = primal_value(wu) - du;

  // Solves the KKT system on a candidate active set: every active labeling
  // of example i attains the same linearized score s_i. Roundoff limits
  // projected ascent to about sqrt(eps) in the duals, which caps the primal
  // accuracy at a kink; the exact solve removes that floor. Negative
  // multipliers leave the active set one at a time.
  using ActiveSet = std::vector<std::pair<std::size_t, Eigen::Index>>;
  const auto polish = [&](ActiveSet rows) -> std::optional<Duals> {
    const auto ne = static_cast<Eigen::Index>(n);
    for (int round = 0; round < 8 && !rows.empty(); ++round) {
      const auto m = static_cast<Eigen::Index>(rows.size());
      Eigen::MatrixXd gs(m, d);
      Vector rhs = Vector::Zero(m + ne);
      for (Eigen::Index r = 0; r < m; ++r) {
        const auto& blk = blocks[rows[static_cast<std::size_t>(r)].first];
        const Eigen::Index j = rows[static_cast<std::size_t>(r)].second;
        gs.row(r) = blk.g.row(j);
        rhs(r) = blk.b(j) + blk.g.row(j).dot(c);
      }
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + ne, m + ne);
      kkt.topLeftCorner(m, m) = gs * gs.transpose() / (nd * lam);
      for (Eigen::Index r = 0; r < m; ++r) {
        const auto i = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].first);
        kkt(r, m + i) = 1.0;
        kkt(m + i, r) = 1.0;
      }
      rhs.tail(ne).setOnes();
      const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      if (!sol.allFinite()) return std::nullopt;
      Eigen::Index worst = 0;
      const double low = sol.head(m).minCoeff(&worst);
      if (low < -1e-12) {
        rows.erase(rows.begin() + worst);
        continue;
      }
      Duals out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = Vector::Zero(blocks[i].b.size());
      for (Eigen::Index r = 0; r < m; ++r)
        out[rows[static_cast<std::size_t>(r)].first](rows[static_cast<std::size_t>(r)].second) = std::max(sol(r), 0.0);
      for (auto& ui : out) {
        const double total = ui.sum();
        if (!(total > 0.0)) return std::nullopt;
        ui /= total;
      }
      return out;
    }
    return std::nullopt;
  };
  const auto dual_support = [&](const Duals& from) {
    ActiveSet rows;
    for (std::size_t i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < from[i].size(); ++j)
        if (from[i](j) > 1e-10) rows.emplace_back(i, j);
    return rows;
  };
  const auto primal_support = [&](const Vector& v) {
    ActiveSet rows;
    for (std::size_t i = 0; i < n; ++i) {
      const Vector s = blocks[i].b + blocks[i].g * v;
      const double top = s.maxCoeff();
      for (Eigen::Index j = 0; j < s.size(); ++j)
        if (s(j) >= top - 1e-7 * (1.0 + std::abs(top))) rows.emplace_back(i, j);
    }
    return rows;
  };

  ProxGradient out;
  if (lip > 0.0) {
    Duals y = u, next(n);
    double t = 1.0;
    const auto try_polish = [&](bool final_attempt) {
      for (const ActiveSet& rows : {dual_support(u), primal_support(wu)}) {
        const std::optional<Duals> p = polish(rows);
        if (!p) continue;
        const Vector wp = primal_of(*p);
        const double dp = dual_value(*p, wp);
        const double gp = primal_value(wp) - dp;
        // Adopting a polished point that misses tol would discard momentum.
        if (gp < gap && (gp <= tol || final_attempt)) {
          u = *p;
          wu = wp;
          du = dp;
          gap = gp;
          y = u;
          t = 1.0;
        }
      }
    };
    for (out.iters = 0; gap > tol; ++out.iters) {
      if (out.iters >= max_iters) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", gap);
        throw DivergenceError(std::string("prox_gradient subsolve stopped with duality gap ") + buf);
      }
      if (out.iters % 10 == 9) {
        try_polish(false);
        if (gap <= tol) break;
      }
      const Vector wy = primal_of(y);
      for (std::size_t i = 0; i < n; ++i)
        next[i] = project_simplex(y[i] + (blocks[i].b + blocks[i].g * wy) / (nd * lip));
      const Vector wn = primal_of(next);
      const double dn = dual_value(next, wn);
      if (dn < du) {
        // A plain step from u that fails to ascend means the duals sit at
        // their numerical optimum; only the exact solve can do better.
        if (t == 1.0) {
          try_polish(true);
          break;
        }
        t = 1.0;
        y = u;
        continue;
      }
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      for (std::size_t i = 0; i < n; ++i) y[i] = next[i] + ((t - 1.0) / tn) * (next[i] - u[i]);
      t = tn;
      u.swap(next);
      wu = wn;
      du = dn;
      gap = primal_value(wu) - du;
    }
  }
  out.gap = std::max(gap, 0.0);
  out.w_plus = wu;
  out.rho = (w - wu) / eta;
  out.norm = out.rho.norm();
  double hinge_sum = 0.0;
  for (const auto& blk : blocks) hinge_sum += (blk.b + blk.g * wu).maxCoeff();
  out.model_value = hinge_sum / nd + 0.5 * lambda * wu.squaredNorm() + (wu - w).squaredNorm() / (2.0 * eta);
  return out;
}

ProxLinearResult proxlinear_run(const ScoreModel& model, double lambda, const ProxLinearConfig& config,
                                const Vector& w0, const ProxLinearCallback& on_row) {
  if (!(config.eta > 0.0)) throw ConfigError("eta must be positive");
  if (!(config.eps0 > 0.0)) throw ConfigError("eps0 must be positive");
  if (!(config.mu > 0.0)) throw ConfigError("mu must be positive");
  if (static_cast<std::size_t>(w0.size()) != model.dim()) throw InvalidInput("w0 has the wrong dimension");
  const std::size_t n = model.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto true_objective = [&](const Vector& w) { return objective(model, w, lambda, std::nullopt, false).value; };

  ProxLinearResult r;
  OracleCounter counter;
  double wall_ms = 0.0;
  const auto emit = [&](const ProxLinearRow& row, const Vector& w) {
    r.trace.push_back(row);
    if (on_row) on_row(row, w);
  };

  Vector w = w0;
  double f = true_objective(w);
  std::optional<ProxGradient> pg;
  if (config.diagnostics) pg = prox_gradient(model, lambda, w, config.eta, 1e-10, 200000, config.enumeration_cap);
  {
    ProxLinearRow row;
    row.objective = f;
    row.prox_grad_norm = pg ? pg->norm : nan;
    row.subproblem_gap = nan;
    emit(row, w);
  }

  Rng rng(config.seed);
  for (std::size_t k = 1; k <= config.outer_iters; ++k) {
    const auto start = std::chrono::steady_clock::now();
    const double kd = static_cast<double>(k);
    const double lam = lambda + 1.0 / config.eta;
    const LinearizedLosses lin(model, w);

    CasimirConfig cc;
    cc.schedule.kind = ScheduleKind::sc_const;
    cc.schedule.mu = config.adaptive_smoothing ? config.mu / kd : config.mu;
    cc.smoother = config.smoother;
    cc.topk = config.topk;
    cc.warm_start = config.inner_warm_start;
    cc.inner = config.inner_budget;
    if (config.lipschitz0) cc.lipschitz = config.adaptive_smoothing ? kd * *config.lipschitz0 : *config.lipschitz0;
    cc.outer_iters = config.inner_iters;
    cc.seed = rng();
    cc.trace_smoothed = false;

    RunResult inner;
    try {
      inner = casimir_run(lin, Regularizer{lam, Vector(w / (config.eta * lam))}, cc, w);
    } catch (const DivergenceError& e) {
      throw DivergenceError("prox-linear iteration " + std::to_string(k) + ": " + e.what());
    }
    counter.oracle_calls += inner.trace.back().oracle_calls;
    counter.anchor_calls += inner.trace.back().anchor_calls;

    const Vector& cand = inner.w;
    const double f_cand = true_objective(cand);
    counter.anchor_calls += n;
    if (!std::isfinite(f_cand)) throw DivergenceError("prox-linear iteration " + std::to_string(k) + ": non-finite objective");
    const bool accept = config.accept_always || f_cand <= f;
    wall_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    ProxLinearRow row;
    row.iter = k;
    row.accepted = accept;
    row.eps = config.eps0 / kd;
    const double model_at =
        objective(lin, cand, Regularizer{0.0, std::nullopt}, std::nullopt, false).value + 0.5 * lambda * cand.squaredNorm();
    row.model_excess = f_cand - model_at;
    row.prox_term = (cand - w).squaredNorm() / (2.0 * config.eta);
    row.subproblem_gap = pg ? prox_model_value(model, lambda, w, config.eta, cand) - pg->model_value : nan;

    if (accept) {
      w = cand;
      f = f_cand;
      if (config.diagnostics) pg = prox_gradient(model, lambda, w, config.eta, 1e-10, 200000, config.enumeration_cap);
    }
    row.objective = f;
    row.prox_grad_norm = pg ? pg->norm : nan;
    row.oracle_calls = counter.oracle_calls;
    row.anchor_calls = counter.anchor_calls;
    row.wall_ms = wall_ms;
    emit(row, w);
  }
  r.w = std::move(w);
  return r;
}

}  // namespace casimir
