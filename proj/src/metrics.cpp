#include "casimir/metrics.hpp"

#include "casimir/errors.hpp"
#include "casimir/oracles_chain.hpp"

namespace casimir {

namespace {

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

Metrics compute_metrics(const std::vector<Labeling>& gold, const std::vector<Labeling>& predicted,
                        const std::vector<std::string>& alphabet) {
  if (gold.size() != predicted.size()) throw InvalidInput("gold and predicted sequence counts differ");
  const std::size_t k = alphabet.size();
  Label outside = kUnknownLabel;
  for (std::size_t c = 0; c < k; ++c)
    if (alphabet[c] == "O") outside = static_cast<Label>(c);

  std::vector<std::size_t> tp(k, 0), fp(k, 0), fn(k, 0);
  std::size_t correct = 0, total = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != predicted[s].size()) throw InvalidInput("gold and predicted lengths differ");
    for (std::size_t t = 0; t < gold[s].size(); ++t) {
      const Label g = gold[s][t], p = predicted[s][t];
      if (p < 0 || static_cast<std::size_t>(p) >= k) throw InvalidInput("prediction outside the alphabet");
      ++total;
      if (g == p) {
        ++correct;
        ++tp[static_cast<std::size_t>(g)];
        continue;
      }
      ++fp[static_cast<std::size_t>(p)];
      if (g >= 0) ++fn[static_cast<std::size_t>(g)];
    }
  }

  Metrics m;
  m.hamming_accuracy = total == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(total);
  std::size_t mtp = 0, mfp = 0, mfn = 0;
  // Unknown gold tags are non-"O" misses.
  for (std::size_t s = 0; s < gold.size(); ++s)
    for (Label g : gold[s])
      if (g == kUnknownLabel) ++mfn;
  for (std::size_t c = 0; c < k; ++c) {
    if (static_cast<Label>(c) == outside) continue;
    mtp += tp[c];
    mfp += fp[c];
    mfn += fn[c];
    m.per_class_f1.emplace_back(alphabet[c], f1(tp[c], fp[c], fn[c]));
  }
  m.token_f1_micro = f1(mtp, mfp, mfn);
  return m;
}

std::vector<Labeling> predict(const FeatureMap& features, const Vector& w, const TaggedDataset& data) {
  if (data.label_alphabet.size() != features.num_tags())
    throw InvalidInput("dataset has " + std::to_string(data.label_alphabet.size()) + " tags, model has " +
                       std::to_string(features.num_tags()));
  if (!data.sequences.empty() && data.num_attributes != features.num_attributes())
    throw InvalidInput("dataset and model disagree on the number of attribute columns");
  if (static_cast<std::size_t>(w.size()) != features.dim()) throw InvalidInput("weights have the wrong dimension");
  std::vector<Labeling> out(data.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t s = 0; s < data.size(); ++s)
    out[s] = viterbi(features.potentials(features.compile(data.sequences[s]), w)).second;
  return out;
}

Metrics evaluate(const FeatureMap& features, const Vector& w, const TaggedDataset& data) {
  const std::vector<Labeling> pred = predict(features, w, data);
  std::vector<Labeling> gold;
  gold.reserve(data.size());
  for (const auto& s : data.sequences) gold.push_back(s.labels);
  return compute_metrics(gold, pred, data.label_alphabet);
}

}  // namespace casimir
