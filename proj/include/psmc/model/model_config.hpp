#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "psmc/model/integrator.hpp"
#include "psmc/model/ode_system.hpp"

namespace psmc {

struct ParameterSpec {
  std::string name;
  double lower;
  double upper;
  friend bool operator==(const ParameterSpec&, const ParameterSpec&) = default;
};

struct StateSpec {
  std::string name;
  double initial;
  /// Right-hand side in the arithmetic expression language.
  std::string rate;
  friend bool operator==(const StateSpec&, const StateSpec&) = default;
};

struct ObservableSpec {
  std::string name;
  std::vector<std::pair<std::string, double>> terms;
  double scale = 1.0;
  friend bool operator==(const ObservableSpec&, const ObservableSpec&) = default;
};

/// Declarative description of a model, as stored in a model config file.
/// The file is JSON; see README for the schema.
struct ModelConfig {
  std::string name;
  std::string description;
  std::vector<ParameterSpec> parameters;
  std::vector<std::string> inputs;
  std::vector<StateSpec> states;
  std::vector<ObservableSpec> observables;
  /// condition name -> input name -> signal
  std::map<std::string, std::map<std::string, InputSignal>> conditions;
  std::vector<double> time_grid;
  StepControl integrator;

  friend bool operator==(const ModelConfig& a, const ModelConfig& b);

  ParameterSpace parameter_space() const;
  TimeGrid grid() const { return TimeGrid(time_grid); }
  std::vector<std::string> state_names() const;
  std::vector<std::string> observable_names() const;

  /// Compiles the rate expressions and binds the inputs of one condition.
  OdeSystem build(const std::string& condition) const;
  ConditionSet build_all() const;
};

ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ModelConfig& config);

ModelConfig parse_model_config(const std::string& text);
std::string serialize_model_config(const ModelConfig& config);
ModelConfig load_model_config(const std::filesystem::path& path);

}  // namespace psmc
