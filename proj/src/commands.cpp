#include "casimir/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include <json.hpp>

#include "casimir/casimir.hpp"
#include "casimir/conll.hpp"
#include "casimir/errors.hpp"
#include "casimir/metrics.hpp"
#include "casimir/model_io.hpp"
#include "casimir/proxlinear.hpp"

namespace casimir {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

InnerSolverBudget inner_budget(const RunConfig& c) {
  InnerSolverBudget b;
  b.mode = c.inner_mode;
  b.t_budget = c.inner_budget;
  b.max_epochs = c.inner_max_epochs;
  return b;
}

Checkpoint from_row(const TraceRow& r) {
  return {r.iter, r.oracle_calls, r.anchor_calls, r.objective, r.wall_ms};
}

// Training and evaluation data with a shared alphabet.
struct LoadedData {
  TaggedDataset train;
  std::optional<TaggedDataset> eval;
};

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw InvalidInput(std::string(what) + " is not set");
  if (!std::filesystem::is_regular_file(path)) throw InvalidInput(std::string(what) + " '" + path + "' does not exist");
}

LoadedData load_data(const RunConfig& c, std::ostream& err) {
  require_file(c.train_data, "train_data");
  if (!c.eval_data.empty()) require_file(c.eval_data, "eval_data");
  LoadedData d;
  d.train = read_conll_file(c.train_data);
  if (d.train.size() == 0) throw InvalidInput("training set '" + c.train_data + "' is empty");
  if (!c.eval_data.empty()) {
    ColumnSpec spec;
    spec.alphabet = d.train.label_alphabet;
    d.eval = read_conll_file(c.eval_data, spec);
    for (const auto& w : d.eval->warnings) err << "warning: " << c.eval_data << ": " << w << '\n';
  }
  return d;
}

double metric_of(const RunConfig& c, const FeatureMap& fm, const Vector& w, const TaggedDataset& data) {
  const Metrics m = evaluate(fm, w, data);
  return c.metric == "accuracy" ? m.hamming_accuracy : m.token_f1_micro;
}

std::size_t reported_calls(const RunConfig& c, const Checkpoint& cp) {
  return c.count_full_gradients ? cp.oracle_calls + cp.anchor_calls : cp.oracle_calls;
}

// Runs `body`, mapping library errors to exit codes and messages.
template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const DivergenceError& e) {
    err << "error: diverged: " << e.what() << '\n';
    return kExitFailure;
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ParseError& e) {
    err << "error: parse: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ModelFormatError& e) {
    err << "error: model file: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

// Output stream that is either a file or a borrowed stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
    if (!*file_) throw InvalidInput("cannot write '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

}  // namespace

Vector run_training(const RunConfig& c, const LinearChainModel& model, const CheckpointSink& sink) {
  const HingeLosses losses(model);
  const Regularizer reg{c.lambda(model.size()), std::nullopt};
  const Vector w0 = Vector::Zero(static_cast<Eigen::Index>(model.dim()));
  const RowCallback on_row = [&](const TraceRow& r, const Vector& w) {
    if (sink) sink(from_row(r), w);
  };

  switch (c.algorithm) {
    case Algorithm::sgd: {
      SgdConfig s;
      s.gamma0 = c.gamma0;
      s.t0 = c.t0;
      s.epochs = c.iterations;
      s.seed = c.seed;
      return sgd_run(losses, reg, s, w0, on_row).w;
    }
    case Algorithm::svrg: {
      SvrgRunConfig s;
      s.smoothing = SmoothingConfig{c.smoother, c.mu, c.topk};
      s.step = c.step;
      s.epochs = c.iterations;
      s.seed = c.seed;
      return svrg_run(losses, reg, s, w0, on_row).w;
    }
    case Algorithm::casimir_svrg_const:
    case Algorithm::casimir_svrg_adapt: {
      const bool sc = reg.lambda > 0.0;
      CasimirConfig cc;
      if (c.algorithm == Algorithm::casimir_svrg_const)
        cc.schedule.kind = sc ? ScheduleKind::sc_const : ScheduleKind::nonsc_const;
      else
        cc.schedule.kind = sc ? ScheduleKind::sc_adaptive : ScheduleKind::nonsc_adaptive;
      cc.schedule.mu = c.mu;
      cc.schedule.kappa = c.kappa;
      cc.schedule.epsilon = c.epsilon;
      cc.smoother = c.smoother;
      cc.topk = c.topk;
      cc.warm_start = c.warm_start;
      cc.inner = inner_budget(c);
      cc.lipschitz = c.lipschitz;
      cc.step = c.step;
      cc.outer_iters = c.iterations;
      cc.seed = c.seed;
      cc.trace_smoothed = false;
      return casimir_run(losses, reg, cc, w0, on_row).w;
    }
    case Algorithm::proxlinear: {
      ProxLinearConfig pc;
      pc.eta = c.eta;
      pc.eps0 = c.eps0;
      pc.mu = c.mu;
      pc.adaptive_smoothing = c.adaptive_smoothing;
      pc.lipschitz0 = c.lipschitz;
      pc.smoother = c.smoother;
      pc.topk = c.topk;
      pc.inner_iters = c.inner_iters;
      pc.inner_budget = inner_budget(c);
      pc.inner_warm_start = c.warm_start;
      pc.accept_always = c.accept_always;
      pc.outer_iters = c.iterations;
      pc.seed = c.seed;
      return proxlinear_run(model, reg.lambda, pc, w0,
                            [&](const ProxLinearRow& r, const Vector& w) {
                              if (sink) sink({r.iter, r.oracle_calls, r.anchor_calls, r.objective, r.wall_ms}, w);
                            })
          .w;
    }
  }
  throw ConfigError("unknown algorithm");
}

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const LoadedData data = load_data(config, err);
    const FeatureMap fm(data.train.label_alphabet.size(), data.train.num_attributes, config.features);
    const LinearChainModel model(fm, data.train);
    const TaggedDataset& eval_set = data.eval ? *data.eval : data.train;

    Sink csv(config.metrics_csv, out);
    *csv << "iter,oracle_calls,train_objective,eval_metric,wall_ms\n";
    const Vector w = run_training(config, model, [&](const Checkpoint& cp, const Vector& wk) {
      if (cp.iter == 0) return;
      *csv << cp.iter << ',' << reported_calls(config, cp) << ',' << num(cp.objective) << ','
           << num(metric_of(config, fm, wk, eval_set)) << ',' << num(config.wall_time ? cp.wall_ms : 0.0) << '\n';
      (*csv).flush();
    });
    if (!config.model_out.empty()) {
      SavedModel saved;
      saved.features = config.features;
      saved.num_attributes = data.train.num_attributes;
      saved.alphabet = data.train.label_alphabet;
      saved.w = w;
      save_model(config.model_out, saved);
    }
    return kExitOk;
  });
}

int cmd_eval(const std::string& model_path, const std::string& data_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(model_path, "model");
    require_file(data_path, "data");
    const SavedModel saved = load_model(model_path);
    ColumnSpec spec;
    spec.alphabet = saved.alphabet;
    const TaggedDataset data = read_conll_file(data_path, spec);
    for (const auto& w : data.warnings) err << "warning: " << data_path << ": " << w << '\n';
    const Metrics m = evaluate(saved.feature_map(), saved.w, data);

    nlohmann::ordered_json j;
    j["hamming_accuracy"] = m.hamming_accuracy;
    j["token_f1_micro"] = m.token_f1_micro;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto& [tag, f] : m.per_class_f1) per[tag] = f;
    j["per_class_f1"] = per;
    out << j.dump(2) << '\n';
    return kExitOk;
  });
}

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const std::vector<Algorithm> algorithms =
        config.algorithms.empty() ? std::vector<Algorithm>{config.algorithm} : config.algorithms;
    const std::vector<std::uint64_t> seeds =
        config.seeds.empty() ? std::vector<std::uint64_t>{config.seed} : config.seeds;
    const LoadedData data = load_data(config, err);
    const FeatureMap fm(data.train.label_alphabet.size(), data.train.num_attributes, config.features);
    const LinearChainModel model(fm, data.train);
    const TaggedDataset& eval_set = data.eval ? *data.eval : data.train;

    Sink csv(config.bench_csv, out);
    *csv << "algorithm,seed,oracle_calls,objective,metric\n";
    for (Algorithm a : algorithms)
      for (std::uint64_t seed : seeds) {
        RunConfig run = config;
        run.algorithm = a;
        run.seed = seed;
        run_training(run, model, [&](const Checkpoint& cp, const Vector& wk) {
          if (cp.iter == 0) return;
          *csv << to_string(a) << ',' << seed << ',' << reported_calls(config, cp) << ',' << num(cp.objective) << ','
               << num(metric_of(config, fm, wk, eval_set)) << '\n';
        });
        (*csv).flush();
      }
    return kExitOk;
  });
}

int cmd_synth(const SynthConfig& config, const std::string& out_path, std::ostream& err) {
  return guarded(err, [&] {
    const TaggedDataset data = synth_chain_dataset(config);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + out_path + "'");
    write_conll(out, data);
    return kExitOk;
  });
}

}  // namespace casimir
