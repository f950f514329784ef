#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psmc/bltl/property_file.hpp"
#include "psmc/model/model_config.hpp"
#include "psmc/posterior/observations.hpp"

namespace psmc::app {

struct ChainConfig {
  /// Burn-in has no default: it must be chosen per model.
  std::optional<std::uint64_t> burn_in;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  /// Empty means "use the model's defaults" (only the reference model has any).
  std::vector<double> proposal_sigmas;
  std::uint64_t progress_every = 0;
  friend bool operator==(const ChainConfig&, const ChainConfig&) = default;
};

enum class TestMode { kFixed, kSequential };
std::string to_string(TestMode mode);
TestMode test_mode_from_string(const std::string& text);

struct TestConfig {
  TestMode mode = TestMode::kSequential;
  double epsilon = 0.01;
  /// Spectral gap to plug into N or M; estimated from the chain when absent.
  std::optional<double> gamma;
  std::optional<std::uint64_t> max_samples;
  std::uint64_t batch_size = 1;
  unsigned jobs = 1;
  friend bool operator==(const TestConfig&, const TestConfig&) = default;
};

/// A run config file (JSON). Relative paths are resolved against the
/// directory holding the config file.
///
///     {
///       "model": "model.json",
///       "data": "data.csv",
///       "properties": "properties.txt",
///       "chain": {"burn_in": 50000, "steps": 200000, "seed": 1,
///                 "proposal_sigmas": [0.02, 0.5, 0.01, 0.02]},
///       "test": {"mode": "sequential", "epsilon": 0.01, "batch_size": 1, "jobs": 1},
///       "output_dir": "results"
///     }
struct RunConfig {
  std::filesystem::path base_dir;  // not serialized
  std::string model;
  std::string data;
  std::string properties;
  ChainConfig chain;
  TestConfig test;
  std::string output_dir;

  std::filesystem::path resolve(const std::string& path) const;
  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

RunConfig run_config_from_json(const nlohmann::json& j, std::filesystem::path base_dir = {});
nlohmann::json to_json(const RunConfig& config);
RunConfig parse_run_config(const std::string& text, std::filesystem::path base_dir = {});
std::string serialize_run_config(const RunConfig& config);
/// Throws ConfigError naming the file when it cannot be read or parsed.
RunConfig load_run_config(const std::filesystem::path& path);

/// Everything a run needs, loaded and cross-checked.
struct Workspace {
  RunConfig config;
  ModelConfig model;
  ConditionSet systems;
  TimeGrid grid;
  ObservationSet data;
  std::vector<bltl::Property> properties;
  /// FNV-1a over the serialized run config and the referenced files.
  std::string config_hash;
};

/// Loads the referenced files. `need_data` and `need_properties` can be
/// cleared for commands that do not use them.
Workspace load_workspace(const RunConfig& config, bool need_data = true, bool need_properties = true);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace psmc::app
