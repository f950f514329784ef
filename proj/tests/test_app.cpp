#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "psmc/app/commands.hpp"
#include "psmc/app/plot_data.hpp"
#include "psmc/error.hpp"
#include "psmc/smc/synthetic.hpp"

using namespace psmc;
using namespace psmc::app;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "psmc_test_app" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

const fs::path kJakstat = PSMC_ASSET_DIR "/jakstat/run.json";
const fs::path kToy = PSMC_ASSET_DIR "/toy/run.json";

}  // namespace

TEST_CASE("run config round trip") {
  const auto a = parse_run_config(R"({
    "model": "m.json", "data": "d.csv", "properties": "p.txt",
    "chain": {"burn_in": 10, "steps": 20, "seed": 3, "proposal_sigmas": [0.1, 0.2]},
    "test": {"mode": "fixed", "epsilon": 0.05, "gamma": 0.2, "max_samples": 99, "batch_size": 4, "jobs": 2},
    "output_dir": "out"})");
  const auto b = parse_run_config(serialize_run_config(a));
  CHECK(a == b);
  CHECK(serialize_run_config(a) == serialize_run_config(b));
  CHECK(b.chain.burn_in == 10u);
  CHECK(b.test.mode == TestMode::kFixed);

  const auto minimal = parse_run_config(R"({"model": "m.json"})");
  CHECK_FALSE(minimal.chain.burn_in.has_value());
  CHECK(parse_run_config(serialize_run_config(minimal)) == minimal);

  CHECK_THROWS_AS(parse_run_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"model": "m", "test": {"mode": "sometimes"}})"), ConfigError);
}

TEST_CASE("reference run config loads") {
  const auto ws = load_workspace(load_run_config(kJakstat), true, true);
  CHECK(ws.properties.size() == 3);
  CHECK(ws.systems.size() == 3);
  CHECK(ws.grid.size() == 16);
  CHECK(ws.data.size() == 32);
  CHECK(ws.config_hash.size() == 16);
  // the hash ignores which files a command happens to load
  CHECK(load_workspace(load_run_config(kJakstat), false, false).config_hash == ws.config_hash);
}

TEST_CASE("simulate writes one row per grid time") {
  const auto dir = scratch("simulate");
  SimulateOptions o;
  o.config = kJakstat;
  o.theta = {0.5, 0.5, 0.2, 0.9};
  o.condition = "transient";
  o.out = dir / "traj.csv";
  CHECK(cmd_simulate(o) == kExitSuccess);
  const auto text = read(o.out);
  CHECK(count_lines(text) == 17);
  CHECK(text.rfind("time_min,STAT,STATp,STATpd,X1", 0) == 0);

  o.theta = {0.5, 31, 0.2, 0.9};  // k2 outside [0, 30]
  o.out = dir / "never.csv";
  CHECK_THROWS_AS(cmd_simulate(o), ValidationError);
  CHECK_FALSE(fs::exists(o.out));

  o.theta = {0.5, 0.5, 0.2, 0.9};
  o.condition = "weekly";
  CHECK_THROWS_AS(cmd_simulate(o), ConfigError);
}

TEST_CASE("simulate of a zero vector field is constant") {
  const auto dir = scratch("zero");
  write(dir / "model.json", R"({
    "parameters": [{"name": "a", "lower": 0, "upper": 1}],
    "states": [{"name": "u", "initial": 2.5, "rate": "0"}, {"name": "v", "initial": -1, "rate": "0*a"}],
    "observables": [{"name": "w", "terms": [{"state": "u", "coefficient": 2}]}],
    "time_grid": [0, 1, 5, 10]})");
  SimulateOptions o;
  o.model = dir / "model.json";
  o.theta = {0.3};
  o.out = dir / "traj.csv";
  cmd_simulate(o);
  std::istringstream in(read(o.out));
  std::string line;
  std::getline(in, line);
  CHECK(line == "time_min,u,v,w");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(line.substr(line.find(',')) == ",2.5,-1,5");
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("missing data file is reported with its path") {
  const auto dir = scratch("missing");
  for (const char* f : {"model.json", "properties.txt"}) fs::copy_file(fs::path(PSMC_ASSET_DIR) / "toy" / f, dir / f);
  auto config = load_run_config(kToy);
  config.base_dir = dir;
  config.data = "nowhere.csv";
  try {
    load_workspace(config, true, true);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find((dir / "nowhere.csv").string()) != std::string::npos);
  }
  PipelineOptions p;
  write(dir / "run.json", serialize_run_config(config));
  p.config = dir / "run.json";
  p.out = dir / "out";
  p.quiet = true;
  CHECK_THROWS_WITH_AS(cmd_pipeline(p), doctest::Contains("[config]"), Error);
}

TEST_CASE("burn-in and proposal sigmas are mandatory") {
  const auto dir = scratch("mandatory");
  for (const char* f : {"model.json", "properties.txt", "data.csv"}) {
    fs::copy_file(fs::path(PSMC_ASSET_DIR) / "toy" / f, dir / f);
  }
  auto config = load_run_config(kToy);
  config.chain.burn_in.reset();
  write(dir / "run.json", serialize_run_config(config));
  SampleOptions s;
  s.config = dir / "run.json";
  s.out = dir / "out";
  s.quiet = true;
  CHECK_THROWS_WITH_AS(cmd_sample(s), doctest::Contains("burn_in"), ConfigError);
  s.burn_in = 10;
  config.chain.proposal_sigmas.clear();
  write(dir / "run.json", serialize_run_config(config));
  CHECK_THROWS_WITH_AS(cmd_sample(s), doctest::Contains("proposal_sigmas"), ConfigError);
}

TEST_CASE("toy pipeline end to end, replayable and deterministic") {
  const auto dir = scratch("pipeline");
  PipelineOptions p;
  p.config = kToy;
  p.out = dir / "a";
  p.quiet = true;
  CHECK(cmd_pipeline(p) == kExitSuccess);
  for (const char* f : {"samples.csv", "sample.json", "gap.json", "pipeline.json", "verify_fast.json",
                        "verify_slow.json", "estimate_fast.json", "estimate_slow.json"}) {
    CHECK_MESSAGE(fs::exists(p.out / f), f);
  }
  const auto summary = json::parse(read(p.out / "pipeline.json"));
  for (const char* f : {"sample.json", "gap.json", "verify_fast.json", "estimate_slow.json", "pipeline.json"}) {
    const auto j = json::parse(read(p.out / f));
    CHECK(j.at("config_hash") == summary.at("config_hash"));
    CHECK(j.at("seed") == 1);
  }

  // same seed, same bytes
  p.out = dir / "b";
  cmd_pipeline(p);
  CHECK(read(dir / "a" / "samples.csv") == read(dir / "b" / "samples.csv"));
  auto strip = [](json j) {
    j.erase("wall_time_s");
    return j;
  };
  CHECK(strip(json::parse(read(dir / "a" / "verify_slow.json"))) ==
        strip(json::parse(read(dir / "b" / "verify_slow.json"))));

  // replaying the stored chain reproduces the decision
  VerifyOptions v;
  v.config = kToy;
  v.property = "slow";
  v.store = dir / "a" / "samples.csv";
  v.gap_from_store = true;
  v.out = dir / "replay.json";
  v.quiet = true;
  const int code = cmd_verify(v);
  const auto replay = strip(json::parse(read(v.out)));
  const auto original = strip(json::parse(read(dir / "a" / "verify_slow.json")));
  CHECK(replay == original);
  CHECK(code == exit_code_for(original["decision"] == "H0" ? Decision::kH0 : Decision::kH1));

  // a different seed moves the chain
  p.out = dir / "c";
  p.seed = 2;
  cmd_pipeline(p);
  CHECK(read(dir / "a" / "samples.csv") != read(dir / "c" / "samples.csv"));
}

TEST_CASE("live verification needs a gap and, when sequential, a cap") {
  VerifyOptions v;
  v.config = kToy;
  v.property = "fast";
  v.live = true;
  v.quiet = true;
  CHECK_THROWS_AS(cmd_verify(v), ConfigError);  // no gamma anywhere
  v.gamma = 0.3;
  CHECK_THROWS_AS(cmd_verify(v), ConfigError);  // sequential without cap
  const auto dir = scratch("live");
  v.max_samples = 5000;
  v.out = dir / "live.json";
  CHECK(cmd_verify(v) == kExitH0);
  const auto j = json::parse(read(v.out));
  CHECK(j["source"] == "live");
  CHECK(j["decision"] == "H0");
  CHECK(j["n"].get<std::uint64_t>() <= 5000);
}

TEST_CASE("exit codes and output directory precedence") {
  CHECK(exit_code_for(Decision::kH0) == 0);
  CHECK(exit_code_for(Decision::kH1) == 1);
  CHECK(exit_code_for(Decision::kUndecided) == 2);
  CHECK(kExitError > 2);

  RunConfig c;
  c.base_dir = "/base";
  c.output_dir = "res";
  CHECK(output_dir("flag", &c) == fs::path("flag"));
  CHECK(output_dir({}, &c) == fs::path("/base/res"));
  ::setenv("PSMC_OUTPUT_DIR", "/env/out", 1);
  c.output_dir.clear();
  CHECK(output_dir({}, &c) == fs::path("/env/out"));
  ::unsetenv("PSMC_OUTPUT_DIR");
  CHECK(output_dir({}, nullptr) == fs::path("results"));
}

TEST_CASE("fixed study decisions match the fixed test") {
  FixedStudyConfig c;
  c.replicas = 5;
  c.ns = {300, 3000};
  c.deltas = {0.05};
  const auto rows = run_fixed_study(c);
  REQUIRE(rows.size() == 10);
  for (const auto& row : rows) {
    TwoStateChain chain(c.p, c.gamma, c.seed, row.replica);
    GeneratorSource source([&] { return chain.next(); });
    const auto out = fixed_test({row.r, row.delta, 0.01}, {row.n, c.gamma}, source);
    CHECK(out.successes == row.successes);
    CHECK(out.decision == row.decision);
  }
}

TEST_CASE("plot data tables") {
  const auto dir = scratch("plot");
  StudyOptions s;
  s.fixed.replicas = 20;
  s.fixed.ns = {100, 1000, 10000};
  s.fixed.deltas = {0.03, 0.1};
  s.sequential.replicas = 20;
  s.sequential.rs = {0.6};
  s.out = dir / "study";
  cmd_study(s);
  const auto files = write_plot_data(s.out, dir / "study_tables");
  CHECK(files.size() == 2);
  // one row per (n, delta), plus the header
  CHECK(count_lines(read(dir / "study_tables" / "error_rates.csv")) == 1 + 3 * 2);
  CHECK(count_lines(read(dir / "study_tables" / "stopping_times.csv")) == 1 + 1);

  // a single verify report gives a one-row stopping-time table
  fs::create_directories(dir / "single");
  write(dir / "single" / "verify_x.json",
        R"({"decision": "H0", "decided_at": 120, "r": 0.7, "delta": 0.05, "epsilon": 0.01, "fixed_N": 500})");
  write_plot_data(dir / "single", dir / "single_tables");
  const auto single = read(dir / "single_tables" / "stopping_times.csv");
  CHECK(count_lines(single) == 2);
  CHECK(single.find("verify_x,0.7,0.05,0.01,1,1,0,120,120,120,120,500") != std::string::npos);

  // a 3-parameter store gives 3 marginals and all 3 pairs, every cell listed
  SampleStore store({"a", "b", "c"}, 0, 1);
  store.append(ParameterVector({0.0, 1.0, 2.0}), 0.0);
  store.append(ParameterVector({1.0, 0.0, 3.0}), 0.0);
  store.append(ParameterVector({1.0, 0.0, 3.0}), 0.0);
  const auto hist = parameter_histograms(store, 4);
  CHECK(hist.size() == 3 * 4);
  std::uint64_t total = 0;
  for (const auto& h : hist) total += h.parameter == "a" ? h.count : 0;
  CHECK(total == 3);
  const auto pairs = parameter_pairs(store, 4);
  CHECK(pairs.size() == 3 * 16);

  fs::create_directories(dir / "empty");
  CHECK_THROWS_AS(write_plot_data(dir / "empty", dir / "empty_out"), DataError);
}
