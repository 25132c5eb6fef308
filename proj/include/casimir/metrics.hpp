#pragma once

#include <string>
#include <utility>
#include <vector>

#include "casimir/conll.hpp"
#include "casimir/features.hpp"

namespace casimir {

// Token-level scores. F1 ignores the "O" tag: a token counts toward the
// micro average when its gold or predicted tag is not "O". With no such
// tokens at all, F1 is 1.
struct Metrics {
  double hamming_accuracy = 0.0;
  double token_f1_micro = 0.0;
  // One entry per non-"O" tag in alphabet order.
  std::vector<std::pair<std::string, double>> per_class_f1;
};

// Gold labels may be kUnknownLabel; they never match a prediction.
Metrics compute_metrics(const std::vector<Labeling>& gold, const std::vector<Labeling>& predicted,
                        const std::vector<std::string>& alphabet);

// Viterbi predictions on un-augmented potentials. Throws InvalidInput if the
// dataset's alphabet size or attribute count differs from the feature map.
std::vector<Labeling> predict(const FeatureMap& features, const Vector& w, const TaggedDataset& data);
Metrics evaluate(const FeatureMap& features, const Vector& w, const TaggedDataset& data);

}  // namespace casimir
