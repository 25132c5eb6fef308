#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "casimir/commands.hpp"
#include "casimir/errors.hpp"
#include "casimir/run_config.hpp"

namespace {

// Config file first, then named flags, then --set assignments.
struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> assignments;

  void add_to(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "flat key=value config file");
    cmd->add_option("--set", assignments, "override a config key (key=value); repeatable");
    add_named(cmd, "--train-data", "train_data", "CoNLL training file");
    add_named(cmd, "--eval-data", "eval_data", "CoNLL evaluation file");
    add_named(cmd, "--algorithm", "algorithm", "sgd | svrg | casimir-svrg-const | casimir-svrg-adapt | proxlinear");
    add_named(cmd, "--seed", "seed", "random seed");
    add_named(cmd, "--iterations", "iterations", "epochs or outer iterations");
  }

  casimir::RunConfig resolve() const {
    casimir::RunConfig c = config_path.empty() ? casimir::RunConfig{} : casimir::load_run_config(config_path);
    for (const auto& [key, value] : named_)
      if (!value.empty()) casimir::set_config_value(c, key, value);
    for (const auto& a : assignments) casimir::apply_override(c, a);
    return c;
  }

 private:
  std::vector<std::pair<std::string, std::string>> named_;

  void add_named(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    named_.emplace_back(key, std::string());
    cmd->add_option_function<std::string>(
        flag, [this, key](const std::string& v) {
          for (auto& [k, val] : named_)
            if (k == key) val = v;
        },
        help);
  }
};

int resolve_or_fail(const ConfigFlags& flags, casimir::RunConfig& out) {
  try {
    out = flags.resolve();
    return casimir::kExitOk;
  } catch (const casimir::Error& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return casimir::kExitBadInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured prediction training with smoothed inference oracles"};
  app.require_subcommand(1);

  ConfigFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "train a model and write a metrics CSV");
  train_flags.add_to(train);
  std::string metrics_csv, model_out;
  bool wall_time = false;
  train->add_option("--metrics-csv", metrics_csv, "metrics CSV path (stdout when empty)");
  train->add_option("--model-out", model_out, "model output path");
  train->add_flag("--wall-time", wall_time, "record real wall time in the CSV");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a model and print JSON metrics");
  std::string model_path, data_path;
  eval->add_option("--model", model_path, "model file")->required();
  eval->add_option("--data", data_path, "CoNLL file")->required();

  ConfigFlags bench_flags;
  CLI::App* bench = app.add_subcommand("bench", "run algorithms x seeds and write a long CSV");
  bench_flags.add_to(bench);
  std::string bench_out, algorithms, seeds;
  bool count_full = false;
  bench->add_option("--out", bench_out, "CSV path (stdout when empty)");
  bench->add_option("--algorithms", algorithms, "comma-separated algorithm list");
  bench->add_option("--seeds", seeds, "comma-separated seed list");
  bench->add_flag("--count-full-gradients", count_full, "include full-gradient passes in oracle_calls");

  CLI::App* synth = app.add_subcommand("synth", "write a synthetic tagging dataset in CoNLL format");
  casimir::SynthConfig sc;
  std::string synth_out;
  synth->add_option("--seed", sc.seed);
  synth->add_option("--n", sc.n, "number of sequences");
  synth->add_option("--p", sc.p, "tokens per sequence");
  synth->add_option("--tags", sc.num_tags, "number of tags");
  synth->add_option("--vocab", sc.vocab, "vocabulary size");
  synth->add_option("--noise", sc.noise, "label noise probability");
  synth->add_option("--temperature", sc.temperature, "Gibbs temperature");
  synth->add_option("--out", synth_out, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : casimir::kExitBadInput;
  }

  if (train->parsed()) {
    casimir::RunConfig c;
    if (int rc = resolve_or_fail(train_flags, c); rc != casimir::kExitOk) return rc;
    if (!metrics_csv.empty()) c.metrics_csv = metrics_csv;
    if (!model_out.empty()) c.model_out = model_out;
    if (wall_time) c.wall_time = true;
    return casimir::cmd_train(c, std::cout, std::cerr);
  }
  if (eval->parsed()) return casimir::cmd_eval(model_path, data_path, std::cout, std::cerr);
  if (bench->parsed()) {
    casimir::RunConfig c;
    if (int rc = resolve_or_fail(bench_flags, c); rc != casimir::kExitOk) return rc;
    try {
      if (!algorithms.empty()) casimir::set_config_value(c, "algorithms", algorithms);
      if (!seeds.empty()) casimir::set_config_value(c, "seeds", seeds);
    } catch (const casimir::Error& e) {
      std::cerr << "error: config: " << e.what() << '\n';
      return casimir::kExitBadInput;
    }
    if (!bench_out.empty()) c.bench_csv = bench_out;
    if (count_full) c.count_full_gradients = true;
    return casimir::cmd_bench(c, std::cout, std::cerr);
  }
  return casimir::cmd_synth(sc, synth_out, std::cerr);
}
