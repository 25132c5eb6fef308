#pragma once

#include <cstddef>
#include <cstdint>

#include "casimir/conll.hpp"

namespace casimir {

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t n = 100;
  std::size_t p = 10;
  std::size_t num_tags = 5;
  std::size_t vocab = 50;
  // Probability of replacing a sampled tag by a uniform one.
  double noise = 0.0;
  // Gibbs temperature of the tag sampler.
  double temperature = 1.0;
  // Standard deviation of the ground-truth emission and transition weights.
  double scale = 2.0;
};

// Sequences of p tokens drawn uniformly from the vocabulary, tagged by exact
// sampling (forward filtering, backward sampling) from the Gibbs
// distribution of a random ground-truth chain model, then corrupted by
// label noise. Columns are a word id and a coarse word class. Tag 0 is "O".
// The generator draws the ground truth first, then for each sequence its
// tokens, its backward-sampling uniforms and its noise decisions.
TaggedDataset synth_chain_dataset(const SynthConfig& config);

}  // namespace casimir
