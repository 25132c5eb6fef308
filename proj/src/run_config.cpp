#include "casimir/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "casimir/errors.hpp"

namespace casimir {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::sgd: return "sgd";
    case Algorithm::svrg: return "svrg";
    case Algorithm::casimir_svrg_const: return "casimir-svrg-const";
    case Algorithm::casimir_svrg_adapt: return "casimir-svrg-adapt";
    case Algorithm::proxlinear: return "proxlinear";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::sgd, Algorithm::svrg, Algorithm::casimir_svrg_const, Algorithm::casimir_svrg_adapt,
                      Algorithm::proxlinear})
    if (name == to_string(a)) return a;
  throw ConfigError("unknown algorithm '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::optional<double> to_opt(const std::string& key, const std::string& v) {
  if (v.empty() || v == "auto") return std::nullopt;
  return to_double(key, v);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');)
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"task", [](RunConfig& c, const auto&, const auto& v) { c.task = v; }},
      {"train_data", [](RunConfig& c, const auto&, const auto& v) { c.train_data = v; }},
      {"eval_data", [](RunConfig& c, const auto&, const auto& v) { c.eval_data = v; }},
      {"algorithm", [](RunConfig& c, const auto&, const auto& v) { c.algorithm = parse_algorithm(v); }},
      {"smoother", [](RunConfig& c, const auto&, const auto& v) { c.smoother = parse_smoother_kind(v); }},
      {"mu", [](RunConfig& c, const auto& k, const auto& v) { c.mu = to_double(k, v); }},
      {"topk", [](RunConfig& c, const auto& k, const auto& v) { c.topk = to_uint(k, v); }},
      {"lambda_c", [](RunConfig& c, const auto& k, const auto& v) { c.lambda_c = to_double(k, v); }},
      {"iterations", [](RunConfig& c, const auto& k, const auto& v) { c.iterations = to_uint(k, v); }},
      {"seed", [](RunConfig& c, const auto& k, const auto& v) { c.seed = to_uint(k, v); }},
      {"inner_mode",
       [](RunConfig& c, const auto& k, const auto& v) {
         if (v == "fixed") c.inner_mode = InnerSolverBudget::Mode::fixed_iterations;
         else if (v == "relative") c.inner_mode = InnerSolverBudget::Mode::relative_accuracy;
         else throw ConfigError(k + ": expected fixed or relative, got '" + v + "'");
       }},
      {"inner_budget", [](RunConfig& c, const auto& k, const auto& v) { c.inner_budget = to_uint(k, v); }},
      {"inner_max_epochs", [](RunConfig& c, const auto& k, const auto& v) { c.inner_max_epochs = to_uint(k, v); }},
      {"warm_start", [](RunConfig& c, const auto&, const auto& v) { c.warm_start = parse_warm_start(v); }},
      {"step", [](RunConfig& c, const auto& k, const auto& v) { c.step = to_opt(k, v); }},
      {"lipschitz", [](RunConfig& c, const auto& k, const auto& v) { c.lipschitz = to_opt(k, v); }},
      {"epsilon", [](RunConfig& c, const auto& k, const auto& v) { c.epsilon = to_opt(k, v); }},
      {"kappa", [](RunConfig& c, const auto& k, const auto& v) { c.kappa = to_opt(k, v); }},
      {"gamma0", [](RunConfig& c, const auto& k, const auto& v) { c.gamma0 = to_double(k, v); }},
      {"t0", [](RunConfig& c, const auto& k, const auto& v) { c.t0 = to_double(k, v); }},
      {"eta", [](RunConfig& c, const auto& k, const auto& v) { c.eta = to_double(k, v); }},
      {"eps0", [](RunConfig& c, const auto& k, const auto& v) { c.eps0 = to_double(k, v); }},
      {"inner_iters", [](RunConfig& c, const auto& k, const auto& v) { c.inner_iters = to_uint(k, v); }},
      {"adaptive_smoothing", [](RunConfig& c, const auto& k, const auto& v) { c.adaptive_smoothing = to_bool(k, v); }},
      {"accept_always", [](RunConfig& c, const auto& k, const auto& v) { c.accept_always = to_bool(k, v); }},
      {"hash_bits",
       [](RunConfig& c, const auto& k, const auto& v) { c.features.hash_bits = static_cast<int>(to_uint(k, v)); }},
      {"hash_seed", [](RunConfig& c, const auto& k, const auto& v) { c.features.hash_seed = to_uint(k, v); }},
      {"window", [](RunConfig& c, const auto& k, const auto& v) { c.features.window = static_cast<int>(to_uint(k, v)); }},
      {"metric",
       [](RunConfig& c, const auto& k, const auto& v) {
         if (v != "f1" && v != "accuracy") throw ConfigError(k + ": expected f1 or accuracy, got '" + v + "'");
         c.metric = v;
       }},
      {"metrics_csv", [](RunConfig& c, const auto&, const auto& v) { c.metrics_csv = v; }},
      {"model_out", [](RunConfig& c, const auto&, const auto& v) { c.model_out = v; }},
      {"wall_time", [](RunConfig& c, const auto& k, const auto& v) { c.wall_time = to_bool(k, v); }},
      {"count_full_gradients",
       [](RunConfig& c, const auto& k, const auto& v) { c.count_full_gradients = to_bool(k, v); }},
      {"algorithms",
       [](RunConfig& c, const auto&, const auto& v) {
         c.algorithms.clear();
         for (const auto& a : split_list(v)) c.algorithms.push_back(parse_algorithm(a));
       }},
      {"seeds",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.seeds.clear();
         for (const auto& s : split_list(v)) c.seeds.push_back(to_uint(k, s));
       }},
      {"bench_csv", [](RunConfig& c, const auto&, const auto& v) { c.bench_csv = v; }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  if (task != "tagging") throw ConfigError("unsupported task '" + task + "'");
  if (!(mu > 0.0)) throw ConfigError("mu must be positive");
  if (topk == 0) throw ConfigError("topk must be at least 1");
  if (!(lambda_c >= 0.0)) throw ConfigError("lambda_c must be non-negative");
  if (step && !(*step > 0.0)) throw ConfigError("step must be positive");
  if (lipschitz && !(*lipschitz > 0.0)) throw ConfigError("lipschitz must be positive");
  if (epsilon && !(*epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (kappa && !(*kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!(gamma0 >= 0.0)) throw ConfigError("gamma0 must be non-negative");
  if (!(t0 >= 1.0)) throw ConfigError("t0 must be at least 1");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (!(eps0 > 0.0)) throw ConfigError("eps0 must be positive");
  if (features.hash_bits < 8 || features.hash_bits > 30) throw ConfigError("hash_bits must be in [8, 30]");
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
  it->second(config, key, value);
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set_config_value(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void read_run_config(std::istream& in, RunConfig& config) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      apply_override(config, line);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  RunConfig c;
  read_run_config(in, c);
  return c;
}

}  // namespace casimir
