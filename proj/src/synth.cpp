#include "casimir/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "casimir/errors.hpp"
#include "casimir/random.hpp"

namespace casimir {

namespace {

// Index drawn proportionally to exp(logw).
std::size_t sample_log_weights(const Eigen::VectorXd& logw, Rng& rng) {
  const double m = logw.maxCoeff();
  const Eigen::VectorXd p = (logw.array() - m).exp();
  double u = uniform01(rng) * p.sum();
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (u < p(k)) return static_cast<std::size_t>(k);
    u -= p(k);
  }
  // Rounding left u at the top: return the last label with mass.
  Eigen::Index last = p.size() - 1;
  while (last > 0 && p(last) == 0.0) --last;
  return static_cast<std::size_t>(last);
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

TaggedDataset synth_chain_dataset(const SynthConfig& c) {
  if (c.n == 0 || c.p == 0 || c.num_tags == 0 || c.vocab == 0) throw InvalidInput("synthetic sizes must be >= 1");
  if (!(c.noise >= 0.0 && c.noise <= 1.0)) throw InvalidInput("noise must be in [0, 1]");
  if (!(c.temperature > 0.0)) throw InvalidInput("temperature must be positive");
  const auto L = static_cast<Eigen::Index>(c.num_tags);
  Rng rng(c.seed);

  // Ground truth: emission[word](tag), transitions over tags plus start (row
  // L) and stop (column L).
  std::vector<Eigen::VectorXd> emission(c.vocab, Eigen::VectorXd(L));
  for (auto& e : emission)
    for (Eigen::Index y = 0; y < L; ++y) e(y) = c.scale * standard_normal(rng);
  Eigen::MatrixXd trans(L + 1, L + 1);
  for (Eigen::Index a = 0; a <= L; ++a)
    for (Eigen::Index b = 0; b <= L; ++b) trans(a, b) = c.scale * standard_normal(rng);

  TaggedDataset data;
  data.num_attributes = 2;
  data.label_alphabet.push_back("O");
  for (std::size_t k = 1; k < c.num_tags; ++k) data.label_alphabet.push_back("T" + std::to_string(k));

  const double inv_t = 1.0 / c.temperature;
  std::vector<Eigen::VectorXd> alpha(c.p, Eigen::VectorXd(L));
  for (std::size_t s = 0; s < c.n; ++s) {
    std::vector<std::size_t> words(c.p);
    for (auto& x : words) x = sample_index(rng, c.vocab);

    // Forward filtering in log space.
    for (Eigen::Index y = 0; y < L; ++y) alpha[0](y) = inv_t * (trans(L, y) + emission[words[0]](y));
    for (std::size_t t = 1; t < c.p; ++t)
      for (Eigen::Index y = 0; y < L; ++y)
        alpha[t](y) = inv_t * emission[words[t]](y) +
                      log_sum_exp(alpha[t - 1] + inv_t * trans.col(y).head(L));
    // Backward sampling.
    Labeling tags(c.p);
    Eigen::VectorXd last(L);
    for (Eigen::Index y = 0; y < L; ++y) last(y) = alpha[c.p - 1](y) + inv_t * trans(y, L);
    tags[c.p - 1] = static_cast<Label>(sample_log_weights(last, rng));
    for (std::size_t t = c.p - 1; t-- > 0;) {
      const Eigen::VectorXd w = alpha[t] + inv_t * trans.col(tags[t + 1]).head(L);
      tags[t] = static_cast<Label>(sample_log_weights(w, rng));
    }
    for (auto& y : tags)
      if (c.noise > 0.0 && uniform01(rng) < c.noise) y = static_cast<Label>(sample_index(rng, c.num_tags));

    Sequence seq;
    seq.labels = std::move(tags);
    for (std::size_t x : words)
      seq.tokens.push_back({"w" + std::to_string(x), "c" + std::to_string(x % 8)});
    data.sequences.push_back(std::move(seq));
  }
  return data;
}

}  // namespace casimir
