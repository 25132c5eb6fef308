#include "casimir/features.hpp"

#include <cstring>

#include "casimir/errors.hpp"

namespace casimir {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::uint64_t seeded_basis(std::uint64_t seed) {
  char buf[sizeof seed];
  std::memcpy(buf, &seed, sizeof seed);
  return fnv1a64(std::string_view(buf, sizeof buf));
}

}  // namespace

FeatureMap::FeatureMap(std::size_t num_tags, std::size_t num_attributes, FeatureConfig config)
    : num_tags_(num_tags), num_attributes_(num_attributes), config_(config) {
  if (config.hash_bits < 8 || config.hash_bits > 30) throw ConfigError("hash_bits must be in [8, 30]");
  if (config.window < 0) throw ConfigError("window must be non-negative");
  if (num_tags == 0) throw ConfigError("feature map needs at least one tag");
  hashed_dim_ = (std::size_t{1} << config.hash_bits) - 1;
}

std::size_t FeatureMap::features_per_token() const {
  return static_cast<std::size_t>(2 * config_.window + 1) * num_attributes_ + 1;
}

FeatureMap::Compiled FeatureMap::compile(const Sequence& s) const {
  const std::size_t p = s.length();
  if (p == 0) throw InvalidInput("cannot featurize an empty sequence");
  const std::uint64_t basis = seeded_basis(config_.hash_seed);
  const long win = config_.window;
  Compiled c;
  c.unary.assign(p, std::vector<std::vector<std::size_t>>(num_tags_));
  std::vector<std::uint64_t> keys;
  for (std::size_t t = 0; t < p; ++t) {
    if (s.tokens[t].size() != num_attributes_) throw InvalidInput("token has the wrong number of attribute columns");
    keys.clear();
    keys.push_back(fnv1a64("bias", basis));
    for (long o = -win; o <= win; ++o) {
      const long pos = static_cast<long>(t) + o;
      for (std::size_t a = 0; a < num_attributes_; ++a) {
        std::string key = std::to_string(o) + '\x1f' + std::to_string(a) + '\x1f';
        if (pos < 0) key += "<start>";
        else if (pos >= static_cast<long>(p)) key += "<stop>";
        else key += s.tokens[static_cast<std::size_t>(pos)][a];
        keys.push_back(fnv1a64(key, basis));
      }
    }
    for (std::size_t y = 0; y < num_tags_; ++y) {
      const std::string tag = '\x1e' + std::to_string(y);
      auto& idx = c.unary[t][y];
      idx.reserve(keys.size());
      for (std::uint64_t k : keys) idx.push_back(static_cast<std::size_t>(fnv1a64(tag, k) % hashed_dim_));
    }
  }
  return c;
}

PotentialTable FeatureMap::potentials(const Compiled& c, const Vector& w) const {
  const std::size_t p = c.length();
  PotentialTable pot = PotentialTable::zeros(TreeTopology::chain(p), LabelDomain::uniform(p, num_tags_));
  for (std::size_t t = 0; t < p; ++t)
    for (std::size_t y = 0; y < num_tags_; ++y) {
      double s = 0.0;
      for (std::size_t f : c.unary[t][y]) s += w(static_cast<Eigen::Index>(f));
      pot.node[t](static_cast<Eigen::Index>(y)) = s;
    }
  for (std::size_t y = 0; y < num_tags_; ++y) {
    const auto yi = static_cast<Eigen::Index>(y);
    pot.node[0](yi) += w(static_cast<Eigen::Index>(pair_index(start_symbol(), y)));
    pot.node[p - 1](yi) += w(static_cast<Eigen::Index>(pair_index(y, stop_symbol())));
  }
  for (std::size_t v = 1; v < p; ++v)
    for (std::size_t j = 0; j < num_tags_; ++j)
      for (std::size_t i = 0; i < num_tags_; ++i)
        pot.edge[v](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
            w(static_cast<Eigen::Index>(pair_index(i, j)));
  return pot;
}

void FeatureMap::add_labeling_gradient(const Compiled& c, const Labeling& y, double scale, Vector& grad) const {
  const std::size_t p = c.length();
  const auto tag = [&](std::size_t t) { return static_cast<std::size_t>(y[t]); };
  for (std::size_t t = 0; t < p; ++t)
    for (std::size_t f : c.unary[t][tag(t)]) grad(static_cast<Eigen::Index>(f)) += scale;
  grad(static_cast<Eigen::Index>(pair_index(start_symbol(), tag(0)))) += scale;
  for (std::size_t t = 1; t < p; ++t) grad(static_cast<Eigen::Index>(pair_index(tag(t - 1), tag(t)))) += scale;
  grad(static_cast<Eigen::Index>(pair_index(tag(p - 1), stop_symbol()))) += scale;
}

void FeatureMap::add_occupancy_gradient(const Compiled& c, const OracleResult& occ, double scale,
                                        Vector& grad) const {
  if (occ.mode == OracleMode::discrete_support) {
    for (const auto& s : occ.support)
      if (s.weight != 0.0) add_labeling_gradient(c, s.labeling, scale * s.weight, grad);
    return;
  }
  const std::size_t p = c.length();
  for (std::size_t t = 0; t < p; ++t)
    for (std::size_t y = 0; y < num_tags_; ++y) {
      const double m = scale * occ.node_marginals[t](static_cast<Eigen::Index>(y));
      if (m == 0.0) continue;
      for (std::size_t f : c.unary[t][y]) grad(static_cast<Eigen::Index>(f)) += m;
      if (t == 0) grad(static_cast<Eigen::Index>(pair_index(start_symbol(), y))) += m;
      if (t + 1 == p) grad(static_cast<Eigen::Index>(pair_index(y, stop_symbol()))) += m;
    }
  for (std::size_t v = 1; v < p; ++v)
    for (std::size_t j = 0; j < num_tags_; ++j)
      for (std::size_t i = 0; i < num_tags_; ++i)
        grad(static_cast<Eigen::Index>(pair_index(i, j))) +=
            scale * occ.edge_marginals[v](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
}

LinearChainModel::LinearChainModel(FeatureMap features, const TaggedDataset& data) : features_(std::move(features)) {
  compiled_.reserve(data.size());
  for (const auto& s : data.sequences) {
    for (Label y : s.labels)
      if (y < 0 || static_cast<std::size_t>(y) >= features_.num_tags())
        throw InvalidInput("gold tag outside the model's tag set");
    compiled_.push_back(features_.compile(s));
    gold_.push_back(s.labels);
    domains_.push_back(LabelDomain::uniform(s.length(), features_.num_tags()));
  }
}

PotentialTable LinearChainModel::potentials(std::size_t i, const Vector& w) const {
  return features_.potentials(compiled_[i], w);
}

PotentialTable LinearChainModel::directional_potentials(std::size_t i, const Vector& w, const Vector& dir) const {
  (void)w;
  return features_.potentials(compiled_[i], dir);
}

void LinearChainModel::add_occupancy_gradient(std::size_t i, const Vector& w, const OracleResult& occ, double scale,
                                              Vector& grad) const {
  (void)w;
  features_.add_occupancy_gradient(compiled_[i], occ, scale, grad);
}

void LinearChainModel::add_labeling_gradient(std::size_t i, const Vector& w, const Labeling& y, double scale,
                                             Vector& grad) const {
  (void)w;
  features_.add_labeling_gradient(compiled_[i], y, scale, grad);
}

double LinearChainModel::row_norm_sq_bound(std::size_t i) const {
  const double p = static_cast<double>(compiled_[i].length());
  return 2.0 * (p * static_cast<double>(features_.features_per_token()) + p + 1.0);
}

}  // namespace casimir
