#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "casimir/conll.hpp"
#include "casimir/loss.hpp"

namespace casimir {

// 64-bit FNV-1a, the versioned string hash behind feature indices.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

struct FeatureConfig {
  int hash_bits = 16;
  std::uint64_t hash_seed = 0;
  int window = 2;
};

// Token features: one hashed (offset, column, value, tag) conjunction per
// offset in [-window, window] and attribute column, padded with start/stop
// symbols, plus a per-tag bias; then a dense tag-bigram block over the tags
// and the start/stop symbols.
class FeatureMap {
 public:
  // Throws ConfigError unless hash_bits is in [8, 30] and window >= 0.
  FeatureMap(std::size_t num_tags, std::size_t num_attributes, FeatureConfig config);

  // Compiled per-sequence features: unary[t][y] lists the indices that fire
  // for tag y at token t (duplicates add up).
  struct Compiled {
    std::vector<std::vector<std::vector<std::size_t>>> unary;
    std::size_t length() const { return unary.size(); }
  };

  std::size_t num_tags() const { return num_tags_; }
  std::size_t num_attributes() const { return num_attributes_; }
  const FeatureConfig& config() const { return config_; }
  // 2^hash_bits - 1.
  std::size_t hashed_dim() const { return hashed_dim_; }
  // (num_tags + 2)^2, starting at hashed_dim().
  std::size_t pairwise_dim() const { return (num_tags_ + 2) * (num_tags_ + 2); }
  std::size_t dim() const { return hashed_dim_ + pairwise_dim(); }
  std::size_t start_symbol() const { return num_tags_; }
  std::size_t stop_symbol() const { return num_tags_ + 1; }
  std::size_t pair_index(std::size_t prev, std::size_t next) const {
    return hashed_dim_ + prev * (num_tags_ + 2) + next;
  }
  // Unary features fired per (token, tag).
  std::size_t features_per_token() const;

  // Throws InvalidInput for an empty sequence or a wrong column count.
  Compiled compile(const Sequence& s) const;
  PotentialTable potentials(const Compiled& c, const Vector& w) const;
  void add_labeling_gradient(const Compiled& c, const Labeling& y, double scale, Vector& grad) const;
  void add_occupancy_gradient(const Compiled& c, const OracleResult& occ, double scale, Vector& grad) const;

 private:
  std::size_t num_tags_;
  std::size_t num_attributes_;
  FeatureConfig config_;
  std::size_t hashed_dim_;
};

// Linear chain score model over a tagged dataset.
class LinearChainModel final : public ScoreModel {
 public:
  // Throws InvalidInput if a gold tag is unknown or outside the feature map's tags.
  LinearChainModel(FeatureMap features, const TaggedDataset& data);

  const FeatureMap& features() const { return features_; }
  const FeatureMap::Compiled& compiled(std::size_t i) const { return compiled_[i]; }

  std::size_t dim() const override { return features_.dim(); }
  std::size_t size() const override { return compiled_.size(); }
  bool is_linear() const override { return true; }
  const Labeling& gold(std::size_t i) const override { return gold_[i]; }
  const LabelDomain& domain(std::size_t i) const override { return domains_[i]; }
  PotentialTable potentials(std::size_t i, const Vector& w) const override;
  PotentialTable directional_potentials(std::size_t i, const Vector& w, const Vector& dir) const override;
  void add_occupancy_gradient(std::size_t i, const Vector& w, const OracleResult& occ, double scale,
                              Vector& grad) const override;
  void add_labeling_gradient(std::size_t i, const Vector& w, const Labeling& y, double scale,
                             Vector& grad) const override;
  // 2 (sum_t F_t + p + 1): twice the feature count of one labeling, exact
  // when no two fired features collide.
  double row_norm_sq_bound(std::size_t i) const override;

 private:
  FeatureMap features_;
  std::vector<FeatureMap::Compiled> compiled_;
  std::vector<Labeling> gold_;
  std::vector<LabelDomain> domains_;
};

}  // namespace casimir
