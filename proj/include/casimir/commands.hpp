#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>

#include "casimir/features.hpp"
#include "casimir/run_config.hpp"
#include "casimir/synth.hpp"

namespace casimir {

// Process exit codes of the commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // divergence or other runtime failure
inline constexpr int kExitBadInput = 2;  // config, data or model file problems

struct Checkpoint {
  std::size_t iter = 0;
  std::size_t oracle_calls = 0;
  std::size_t anchor_calls = 0;
  double objective = 0.0;
  double wall_ms = 0.0;
};

using CheckpointSink = std::function<void(const Checkpoint&, const Vector&)>;

// Runs config.algorithm from w = 0 with config.seed and returns the final
// iterate. The sink sees every trace row, including row 0.
Vector run_training(const RunConfig& config, const LinearChainModel& model, const CheckpointSink& sink);

// Writes the metrics CSV (iter, oracle_calls, train_objective, eval_metric,
// wall_ms; one row per iteration) and the model file.
int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err);
// Prints {hamming_accuracy, token_f1_micro, per_class_f1} as JSON.
int cmd_eval(const std::string& model_path, const std::string& data_path, std::ostream& out, std::ostream& err);
// Long-format CSV: algorithm, seed, oracle_calls, objective, metric; one row
// per (algorithm, seed, iteration).
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);
// Writes a synthetic dataset in CoNLL format.
int cmd_synth(const SynthConfig& config, const std::string& out_path, std::ostream& err);

}  // namespace casimir
