#include "psmc/app/run_config.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc::app {

using nlohmann::json;

std::string to_string(TestMode mode) { return mode == TestMode::kFixed ? "fixed" : "sequential"; }

TestMode test_mode_from_string(const std::string& text) {
  if (text == "fixed") return TestMode::kFixed;
  if (text == "sequential") return TestMode::kSequential;
  throw ConfigError(fmt::format("unknown test mode '{}' (expected fixed or sequential)", text));
}

std::filesystem::path RunConfig::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.model == b.model && a.data == b.data && a.properties == b.properties && a.chain == b.chain &&
         a.test == b.test && a.output_dir == b.output_dir;
}

namespace {

template <typename T>
T get(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw ConfigError(fmt::format("{}: missing key '{}'", where, key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: bad value for '{}': {}", where, key, e.what()));
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const char* where) {
  return j.contains(key) && !j.at(key).is_null() ? get<T>(j, key, where) : fallback;
}

}  // namespace

RunConfig run_config_from_json(const json& j, std::filesystem::path base_dir) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c;
  c.base_dir = std::move(base_dir);
  c.model = get<std::string>(j, "model", "run config");
  c.data = get_or<std::string>(j, "data", "", "run config");
  c.properties = get_or<std::string>(j, "properties", "", "run config");
  c.output_dir = get_or<std::string>(j, "output_dir", "", "run config");

  const json chain = j.value("chain", json::object());
  if (chain.contains("burn_in") && !chain.at("burn_in").is_null()) {
    c.chain.burn_in = get<std::uint64_t>(chain, "burn_in", "chain");
  }
  c.chain.steps = get_or<std::uint64_t>(chain, "steps", 0, "chain");
  c.chain.seed = get_or<std::uint64_t>(chain, "seed", 0, "chain");
  c.chain.proposal_sigmas = get_or<std::vector<double>>(chain, "proposal_sigmas", {}, "chain");
  c.chain.progress_every = get_or<std::uint64_t>(chain, "progress_every", 0, "chain");

  const json test = j.value("test", json::object());
  c.test.mode = test_mode_from_string(get_or<std::string>(test, "mode", "sequential", "test"));
  c.test.epsilon = get_or<double>(test, "epsilon", 0.01, "test");
  if (test.contains("gamma") && !test.at("gamma").is_null()) c.test.gamma = get<double>(test, "gamma", "test");
  if (test.contains("max_samples") && !test.at("max_samples").is_null()) {
    c.test.max_samples = get<std::uint64_t>(test, "max_samples", "test");
  }
  c.test.batch_size = get_or<std::uint64_t>(test, "batch_size", 1, "test");
  c.test.jobs = get_or<unsigned>(test, "jobs", 1, "test");

  if (!(c.test.epsilon > 0.0 && c.test.epsilon < 1.0)) throw ConfigError("test.epsilon must lie in (0, 1)");
  if (c.test.gamma && !(*c.test.gamma > 0.0 && *c.test.gamma <= 1.0)) {
    throw ConfigError("test.gamma must lie in (0, 1]");
  }
  if (c.test.batch_size == 0) throw ConfigError("test.batch_size must be positive");
  return c;
}

json to_json(const RunConfig& c) {
  json chain = {{"steps", c.chain.steps}, {"seed", c.chain.seed}};
  chain["burn_in"] = c.chain.burn_in ? json(*c.chain.burn_in) : json(nullptr);
  if (!c.chain.proposal_sigmas.empty()) chain["proposal_sigmas"] = c.chain.proposal_sigmas;
  if (c.chain.progress_every) chain["progress_every"] = c.chain.progress_every;
  json test = {{"mode", to_string(c.test.mode)},
               {"epsilon", c.test.epsilon},
               {"batch_size", c.test.batch_size},
               {"jobs", c.test.jobs}};
  if (c.test.gamma) test["gamma"] = *c.test.gamma;
  if (c.test.max_samples) test["max_samples"] = *c.test.max_samples;
  json j = {{"model", c.model}, {"chain", chain}, {"test", test}};
  if (!c.data.empty()) j["data"] = c.data;
  if (!c.properties.empty()) j["properties"] = c.properties;
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir;
  return j;
}

RunConfig parse_run_config(const std::string& text, std::filesystem::path base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("run config is not valid JSON: {}", e.what()));
  }
  return run_config_from_json(j, std::move(base_dir));
}

std::string serialize_run_config(const RunConfig& config) { return to_json(config).dump(2); }

namespace {

std::string slurp(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open {} '{}'", what, path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  const std::string text = slurp(path, "run config");
  try {
    return parse_run_config(text, std::filesystem::absolute(path).parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

Workspace load_workspace(const RunConfig& config, bool need_data, bool need_properties) {
  // The hash covers everything that shapes results except the seed (reported
  // separately) and the worker count (which never changes results). Every
  // referenced file that exists is hashed, loaded or not.
  RunConfig canonical = config;
  canonical.chain.seed = 0;
  canonical.test.jobs = 1;
  std::string fingerprint = serialize_run_config(canonical);
  for (const auto* file : {&config.data, &config.properties}) {
    const auto path = config.resolve(*file);
    if (!file->empty() && std::filesystem::is_regular_file(path)) fingerprint += slurp(path, "file");
  }
  const auto model_path = config.resolve(config.model);
  fingerprint += slurp(model_path, "model file");
  ModelConfig model = load_model_config(model_path);
  ConditionSet systems = model.build_all();
  TimeGrid grid = model.grid();

  ObservationSet data;
  if (need_data) {
    if (config.data.empty()) throw ConfigError("run config has no data file");
    const auto path = config.resolve(config.data);
    if (!std::filesystem::exists(path)) throw DataError(fmt::format("data file '{}' does not exist", path.string()));
    const auto names = model.observable_names();
    data = load_observations_csv(path, names);
    data.validate(systems, grid);
  }
  std::vector<bltl::Property> properties;
  if (need_properties) {
    if (config.properties.empty()) throw ConfigError("run config has no properties file");
    const auto path = config.resolve(config.properties);
    const auto names = model.state_names();
    properties = bltl::load_properties(path, names);
    for (const auto& p : properties) {
      if (!systems.count(p.condition)) {
        throw ConfigError(fmt::format("property '{}' uses unknown condition '{}'", p.name, p.condition));
      }
    }
  }
  return {config, std::move(model), std::move(systems), std::move(grid), std::move(data), std::move(properties),
          fnv1a_hex(fingerprint)};
}

}  // namespace psmc::app
