#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "casimir/commands.hpp"
#include "casimir/errors.hpp"
#include "casimir/run_config.hpp"

using namespace casimir;
namespace fs = std::filesystem;

namespace {

const std::string kData = CASIMIR_TEST_DATA;

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("casimir_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunConfig small_config() {
  RunConfig c;
  c.train_data = kData + "/synth_small.conll";
  c.algorithm = Algorithm::casimir_svrg_const;
  c.iterations = 5;
  c.seed = 11;
  c.features = FeatureConfig{10, 0, 1};
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CASIMIR_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config files: keys, comments, overrides and validation") {
  std::istringstream in(
      "# training run\n"
      "algorithm = proxlinear\n"
      "mu = 0.25   # inline comment\n"
      "lambda_c = 2\n"
      "\n"
      "seeds = 1,2,3\n");
  RunConfig c;
  read_run_config(in, c);
  CHECK(c.algorithm == Algorithm::proxlinear);
  CHECK(c.mu == 0.25);
  CHECK(c.lambda(4) == 0.5);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
  apply_override(c, "mu=0.5");
  CHECK(c.mu == 0.5);

  RunConfig d;
  CHECK_THROWS_AS(set_config_value(d, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(set_config_value(d, "mu", "abc"), ConfigError);
  CHECK_THROWS_AS(set_config_value(d, "algorithm", "adam"), ConfigError);
  CHECK_THROWS_AS(apply_override(d, "mu"), ConfigError);
  std::istringstream bad("iterations = 3\nbogus = 1\n");
  CHECK_THROWS_AS(read_run_config(bad, d), ConfigError);
  RunConfig neg;
  neg.mu = -1.0;
  CHECK_THROWS_AS(neg.validate(), ConfigError);
  CHECK_THROWS_AS(load_run_config(kData + "/missing.cfg"), InvalidInput);
  for (Algorithm a : {Algorithm::sgd, Algorithm::svrg, Algorithm::casimir_svrg_const, Algorithm::casimir_svrg_adapt,
                      Algorithm::proxlinear})
    CHECK(parse_algorithm(to_string(a)) == a);
}

TEST_CASE("cmd_train writes one CSV row per outer iteration and a model") {
  Scratch tmp("train");
  RunConfig c = small_config();
  c.metrics_csv = tmp / "m.csv";
  c.model_out = tmp / "m.bin";
  std::ostringstream out, err;
  REQUIRE(cmd_train(c, out, err) == kExitOk);
  const auto rows = lines(slurp(c.metrics_csv));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "iter,oracle_calls,train_objective,eval_metric,wall_ms");
  CHECK(rows[1].rfind("1,", 0) == 0);
  CHECK(rows[5].rfind("5,", 0) == 0);
  CHECK(slurp(c.model_out).substr(0, 4) == "CSMR");

  // Stdout when no CSV path is given.
  RunConfig s = small_config();
  s.algorithm = Algorithm::sgd;
  s.iterations = 3;
  std::ostringstream sout;
  REQUIRE(cmd_train(s, sout, err) == kExitOk);
  CHECK(lines(sout.str()).size() == 4);
}

TEST_CASE("cmd_train is byte-reproducible for every algorithm") {
  Scratch tmp("repro");
  for (Algorithm a : {Algorithm::sgd, Algorithm::svrg, Algorithm::casimir_svrg_const, Algorithm::casimir_svrg_adapt,
                      Algorithm::proxlinear}) {
    CAPTURE(to_string(a));
    RunConfig c = small_config();
    c.algorithm = a;
    c.iterations = 3;
    std::ostringstream err;
    std::string csv[2], model[2];
    for (int r = 0; r < 2; ++r) {
      c.metrics_csv = tmp / ("m" + std::to_string(r) + ".csv");
      c.model_out = tmp / ("m" + std::to_string(r) + ".bin");
      REQUIRE(cmd_train(c, err, err) == kExitOk);
      csv[r] = slurp(c.metrics_csv);
      model[r] = slurp(c.model_out);
    }
    CHECK(csv[0] == csv[1]);
    CHECK(model[0] == model[1]);
    CHECK(lines(csv[0]).size() == 4);
  }
}

TEST_CASE("missing data exits 2 without writing files") {
  Scratch tmp("missing");
  RunConfig c = small_config();
  c.train_data = kData + "/missing.conll";
  c.metrics_csv = tmp / "m.csv";
  c.model_out = tmp / "m.bin";
  std::ostringstream out, err;
  CHECK(cmd_train(c, out, err) == kExitBadInput);
  CHECK(err.str().find("missing.conll") != std::string::npos);
  CHECK_FALSE(fs::exists(c.metrics_csv));
  CHECK_FALSE(fs::exists(c.model_out));

  RunConfig bad = small_config();
  bad.mu = 0.0;
  CHECK(cmd_train(bad, out, err) == kExitBadInput);
}

TEST_CASE("cmd_eval prints three JSON keys and reports model corruption") {
  Scratch tmp("eval");
  RunConfig c = small_config();
  c.model_out = tmp / "m.bin";
  c.metrics_csv = tmp / "m.csv";
  std::ostringstream sink, err;
  REQUIRE(cmd_train(c, sink, err) == kExitOk);

  std::ostringstream out;
  REQUIRE(cmd_eval(c.model_out, c.train_data, out, err) == kExitOk);
  const auto j = nlohmann::json::parse(out.str());
  REQUIRE(j.size() == 3);
  CHECK(j.contains("hamming_accuracy"));
  CHECK(j.contains("token_f1_micro"));
  CHECK(j["per_class_f1"].is_object());
  const double acc = j["hamming_accuracy"].get<double>();
  CHECK((acc >= 0.0 && acc <= 1.0));

  std::string bytes = slurp(c.model_out);
  bytes[1] = '?';
  const std::string broken = tmp / "broken.bin";
  std::ofstream(broken, std::ios::binary) << bytes;
  std::ostringstream out2, err2;
  CHECK(cmd_eval(broken, c.train_data, out2, err2) == kExitBadInput);
  CHECK(err2.str().find("magic") != std::string::npos);
  CHECK(cmd_eval(tmp / "none.bin", c.train_data, out2, err2) == kExitBadInput);
}

TEST_CASE("a separable fixture is fit perfectly") {
  Scratch tmp("perfect");
  RunConfig c;
  c.train_data = kData + "/toy.conll";
  c.algorithm = Algorithm::casimir_svrg_const;
  c.lambda_c = 0.01;
  c.mu = 0.1;
  c.iterations = 30;
  c.features = FeatureConfig{10, 0, 0};
  c.model_out = tmp / "m.bin";
  c.metrics_csv = tmp / "m.csv";
  c.metric = "accuracy";
  std::ostringstream sink, err;
  REQUIRE(cmd_train(c, sink, err) == kExitOk);
  std::ostringstream out;
  REQUIRE(cmd_eval(c.model_out, c.train_data, out, err) == kExitOk);
  CHECK(nlohmann::json::parse(out.str())["hamming_accuracy"].get<double>() == 1.0);
}

TEST_CASE("cmd_bench emits one row per algorithm, seed and checkpoint") {
  Scratch tmp("bench");
  RunConfig c = small_config();
  c.iterations = 10;
  c.algorithms = {Algorithm::sgd, Algorithm::casimir_svrg_const};
  c.seeds = {1, 2, 3};
  c.bench_csv = tmp / "b.csv";
  std::ostringstream out, err;
  REQUIRE(cmd_bench(c, out, err) == kExitOk);
  const auto rows = lines(slurp(c.bench_csv));
  REQUIRE(rows.size() == 61);
  CHECK(rows[0] == "algorithm,seed,oracle_calls,objective,metric");

  // Anchor passes only show up with the flag; SGD has none.
  const auto calls = [](const std::string& row) {
    std::vector<std::string> f;
    std::istringstream in(row);
    for (std::string x; std::getline(in, x, ',');) f.push_back(x);
    return std::stoull(f[2]);
  };
  c.count_full_gradients = true;
  c.bench_csv = tmp / "full.csv";
  REQUIRE(cmd_bench(c, out, err) == kExitOk);
  const auto full = lines(slurp(c.bench_csv));
  REQUIRE(full.size() == 61);
  CHECK(calls(full[1]) == calls(rows[1]));
  CHECK(calls(full[31]) > calls(rows[31]));

  // A seed's rows do not depend on which other seeds run.
  c.count_full_gradients = false;
  c.seeds = {2};
  c.bench_csv = tmp / "one.csv";
  REQUIRE(cmd_bench(c, out, err) == kExitOk);
  const auto one = lines(slurp(c.bench_csv));
  REQUIRE(one.size() == 21);
  for (std::size_t k = 1; k <= 10; ++k) {
    CHECK(one[k] == rows[10 + k]);
    CHECK(one[10 + k] == rows[40 + k]);
  }
}

TEST_CASE("command-line front end") {
  Scratch tmp("exe");
  const std::string data = kData + "/synth_small.conll";
  CHECK(run_cli("train --train-data " + kData + "/missing.conll --metrics-csv " + (tmp / "m.csv")) == 2);
  CHECK_FALSE(fs::exists(tmp / "m.csv"));
  CHECK(run_cli("train --train-data " + data + " --set bogus=1") == 2);
  CHECK(run_cli("frobnicate") == 2);

  const std::string cfg = tmp / "run.cfg";
  std::ofstream(cfg) << "train_data = " << data << "\niterations = 2\nhash_bits = 10\n";
  REQUIRE(run_cli("train -c " + cfg + " --seed 3 --metrics-csv " + (tmp / "a.csv") + " --model-out " +
                  (tmp / "a.bin")) == 0);
  CHECK(lines(slurp(tmp / "a.csv")).size() == 3);
  CHECK(run_cli("eval --model " + (tmp / "a.bin") + " --data " + data) == 0);
  CHECK(run_cli("bench -c " + cfg + " --algorithms sgd,svrg --seeds 1,2 --out " + (tmp / "b.csv")) == 0);
  CHECK(lines(slurp(tmp / "b.csv")).size() == 9);
  CHECK(run_cli("synth --n 3 --p 2 --out " + (tmp / "s.conll")) == 0);
  CHECK(lines(slurp(tmp / "s.conll")).size() == 8);
}
