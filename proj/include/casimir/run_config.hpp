#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "casimir/casimir.hpp"
#include "casimir/features.hpp"
#include "casimir/smoothing.hpp"

namespace casimir {

enum class Algorithm { sgd, svrg, casimir_svrg_const, casimir_svrg_adapt, proxlinear };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

// One training run. Read from a flat `key = value` file ('#' starts a
// comment); keys mirror the field names.
struct RunConfig {
  std::string task = "tagging";
  std::string train_data;
  std::string eval_data;
  Algorithm algorithm = Algorithm::casimir_svrg_const;

  SmootherKind smoother = SmootherKind::topk_l2;
  double mu = 1.0;
  std::size_t topk = 5;
  // lambda = lambda_c / n once the training set size is known.
  double lambda_c = 1.0;
  // Epochs for sgd/svrg, outer iterations for the others.
  std::size_t iterations = 10;
  std::uint64_t seed = 0;

  // Casimir and SVRG.
  InnerSolverBudget::Mode inner_mode = InnerSolverBudget::Mode::fixed_iterations;
  std::size_t inner_budget = 0;  // 0 means n
  std::size_t inner_max_epochs = 50;
  WarmStart warm_start = WarmStart::prox_center;
  std::optional<double> step;
  std::optional<double> lipschitz;
  std::optional<double> epsilon;
  std::optional<double> kappa;

  // SGD.
  double gamma0 = 1.0;
  double t0 = 100.0;

  // Prox-linear.
  double eta = 1.0;
  double eps0 = 1.0;
  std::size_t inner_iters = 5;
  bool adaptive_smoothing = true;
  bool accept_always = false;

  FeatureConfig features;
  // Evaluation metric in the CSV: "f1" (token micro-F1) or "accuracy".
  std::string metric = "f1";

  std::string metrics_csv;
  std::string model_out;
  // Record real wall time; off keeps the CSV byte-reproducible (wall_ms = 0).
  bool wall_time = false;
  // Include full-gradient anchor passes in oracle_calls.
  bool count_full_gradients = false;

  // Benchmarks.
  std::vector<Algorithm> algorithms;
  std::vector<std::uint64_t> seeds;
  std::string bench_csv;

  double lambda(std::size_t n) const { return n == 0 ? 0.0 : lambda_c / static_cast<double>(n); }
  // Throws ConfigError on inconsistent values.
  void validate() const;
};

// Sets one key; throws ConfigError for unknown keys or malformed values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
// Applies `key=value` (flags use the same keys).
void apply_override(RunConfig& config, const std::string& assignment);
void read_run_config(std::istream& in, RunConfig& config);
// Throws InvalidInput if the file is missing.
RunConfig load_run_config(const std::string& path);

}  // namespace casimir
