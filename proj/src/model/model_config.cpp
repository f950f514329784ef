#include "psmc/model/model_config.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "psmc/error.hpp"
#include "psmc/model/expression.hpp"

namespace psmc {

using nlohmann::json;

bool operator==(const ModelConfig& a, const ModelConfig& b) {
  return a.name == b.name && a.description == b.description && a.parameters == b.parameters &&
         a.inputs == b.inputs && a.states == b.states && a.observables == b.observables &&
         a.conditions == b.conditions && a.time_grid == b.time_grid &&
         a.integrator.abs_tol == b.integrator.abs_tol &&
         a.integrator.rel_tol == b.integrator.rel_tol &&
         a.integrator.min_step == b.integrator.min_step &&
         a.integrator.max_steps == b.integrator.max_steps;
}

ParameterSpace ModelConfig::parameter_space() const {
  std::vector<std::string> names;
  std::vector<Interval> bounds;
  for (const auto& p : parameters) {
    names.push_back(p.name);
    bounds.push_back({p.lower, p.upper});
  }
  return ParameterSpace(std::move(names), std::move(bounds));
}

std::vector<std::string> ModelConfig::state_names() const {
  std::vector<std::string> names;
  for (const auto& s : states) names.push_back(s.name);
  return names;
}

std::vector<std::string> ModelConfig::observable_names() const {
  std::vector<std::string> names;
  for (const auto& o : observables) names.push_back(o.name);
  return names;
}

OdeSystem ModelConfig::build(const std::string& condition) const {
  auto cond = conditions.find(condition);
  if (cond == conditions.end()) {
    throw ConfigError(fmt::format("model '{}' has no condition '{}'", name, condition));
  }

  SymbolTable symbols{state_names(), {}, inputs};
  for (const auto& p : parameters) symbols.parameters.push_back(p.name);

  auto rates = std::make_shared<std::vector<Expression>>();
  for (const auto& s : states) {
    try {
      rates->push_back(Expression::compile(s.rate, symbols));
    } catch (const ParseError& e) {
      throw ConfigError(fmt::format("rate of state '{}': {}", s.name, e.what()));
    }
  }
  VectorField field = [rates](std::span<const double> x, std::span<const double> u,
                              std::span<const double> theta, double t, std::span<double> dx) {
    const ExpressionContext ctx{x, theta, u, t};
    for (std::size_t i = 0; i < rates->size(); ++i) dx[i] = (*rates)[i].evaluate(ctx);
  };

  std::vector<InputSignal> signals;
  for (const auto& input : inputs) {
    auto it = cond->second.find(input);
    if (it == cond->second.end()) {
      throw ConfigError(fmt::format("condition '{}' does not define input '{}'", condition, input));
    }
    signals.push_back(it->second);
  }

  const auto names = state_names();
  std::vector<ObservationForm> forms;
  for (const auto& o : observables) {
    ObservationForm form{o.name, {}, o.scale};
    for (const auto& [state, coefficient] : o.terms) {
      auto it = std::find(names.begin(), names.end(), state);
      if (it == names.end()) {
        throw ConfigError(fmt::format("observable '{}' references unknown state '{}'", o.name, state));
      }
      form.terms.emplace_back(static_cast<std::size_t>(it - names.begin()), coefficient);
    }
    forms.push_back(std::move(form));
  }

  std::vector<double> initial;
  for (const auto& s : states) initial.push_back(s.initial);

  return OdeSystem(names, std::move(initial), inputs, std::move(signals), std::move(field),
                   std::move(forms), parameter_space());
}

ConditionSet ModelConfig::build_all() const {
  ConditionSet out;
  for (const auto& [condition, signals] : conditions) out.emplace(condition, build(condition));
  return out;
}

namespace {

template <typename T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(fmt::format("{}: missing key '{}'", where, key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: key '{}': {}", where, key, e.what()));
  }
}

void check_unique(const std::vector<std::string>& names, const std::string& what) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw ConfigError(fmt::format("duplicate {} name '{}'", what, n));
  }
}

}  // namespace

ModelConfig model_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  ModelConfig c;
  c.name = j.value("name", std::string("model"));
  c.description = j.value("description", std::string());

  for (const auto& p : required<json>(j, "parameters", "model")) {
    c.parameters.push_back({required<std::string>(p, "name", "parameter"),
                            required<double>(p, "lower", "parameter"),
                            required<double>(p, "upper", "parameter")});
  }
  c.inputs = j.value("inputs", std::vector<std::string>{});
  for (const auto& s : required<json>(j, "states", "model")) {
    c.states.push_back({required<std::string>(s, "name", "state"),
                        required<double>(s, "initial", "state"),
                        required<std::string>(s, "rate", "state")});
  }
  for (const auto& o : j.value("observables", json::array())) {
    ObservableSpec spec;
    spec.name = required<std::string>(o, "name", "observable");
    spec.scale = o.value("scale", 1.0);
    for (const auto& term : required<json>(o, "terms", "observable " + spec.name)) {
      spec.terms.emplace_back(required<std::string>(term, "state", "observable term"),
                              required<double>(term, "coefficient", "observable term"));
    }
    c.observables.push_back(std::move(spec));
  }
  const json conditions = j.value("conditions", json::object());
  for (const auto& [cond, signals] : conditions.items()) {
    auto& bound = c.conditions[cond];
    for (const auto& [input, table] : signals.items()) {
      std::vector<Breakpoint> points;
      for (const auto& pt : required<json>(table, "points", "input " + input)) {
        if (!pt.is_array() || pt.size() != 2) {
          throw ConfigError(fmt::format("input '{}' of condition '{}': points must be [time, value]",
                                        input, cond));
        }
        points.push_back({pt[0].get<double>(), pt[1].get<double>()});
      }
      try {
        bound.emplace(input, InputSignal(std::move(points), interpolation_from_string(table.value(
                                                                 "interpolation", "linear"))));
      } catch (const ValidationError& e) {
        throw ConfigError(fmt::format("input '{}' of condition '{}': {}", input, cond, e.what()));
      }
    }
  }
  if (c.inputs.empty() && c.conditions.empty()) c.conditions["default"] = {};
  c.time_grid = required<std::vector<double>>(j, "time_grid", "model");
  if (j.contains("integrator")) {
    const auto& in = j.at("integrator");
    c.integrator.abs_tol = in.value("abs_tol", c.integrator.abs_tol);
    c.integrator.rel_tol = in.value("rel_tol", c.integrator.rel_tol);
    c.integrator.min_step = in.value("min_step", c.integrator.min_step);
    c.integrator.max_steps = in.value("max_steps", c.integrator.max_steps);
  }

  std::vector<std::string> param_names;
  for (const auto& p : c.parameters) param_names.push_back(p.name);
  check_unique(param_names, "parameter");
  check_unique(c.state_names(), "state");
  check_unique(c.inputs, "input");
  try {
    (void)c.parameter_space();
    (void)c.grid();
    c.integrator.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json to_json(const ModelConfig& c) {
  json j;
  j["name"] = c.name;
  if (!c.description.empty()) j["description"] = c.description;
  j["parameters"] = json::array();
  for (const auto& p : c.parameters) {
    j["parameters"].push_back({{"name", p.name}, {"lower", p.lower}, {"upper", p.upper}});
  }
  j["inputs"] = c.inputs;
  j["states"] = json::array();
  for (const auto& s : c.states) {
    j["states"].push_back({{"name", s.name}, {"initial", s.initial}, {"rate", s.rate}});
  }
  j["observables"] = json::array();
  for (const auto& o : c.observables) {
    json terms = json::array();
    for (const auto& [state, coefficient] : o.terms) {
      terms.push_back({{"state", state}, {"coefficient", coefficient}});
    }
    j["observables"].push_back({{"name", o.name}, {"terms", terms}, {"scale", o.scale}});
  }
  j["conditions"] = json::object();
  for (const auto& [cond, signals] : c.conditions) {
    json bound = json::object();
    for (const auto& [input, signal] : signals) {
      json points = json::array();
      for (const auto& b : signal.breakpoints()) points.push_back({b.time, b.value});
      bound[input] = {{"interpolation", to_string(signal.interpolation())}, {"points", points}};
    }
    j["conditions"][cond] = bound;
  }
  j["time_grid"] = c.time_grid;
  j["integrator"] = {{"abs_tol", c.integrator.abs_tol},
                     {"rel_tol", c.integrator.rel_tol},
                     {"min_step", c.integrator.min_step},
                     {"max_steps", c.integrator.max_steps}};
  return j;
}

ModelConfig parse_model_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("model config is not valid JSON: {}", e.what()));
  }
  return model_config_from_json(j);
}

std::string serialize_model_config(const ModelConfig& config) {
  return to_json(config).dump(2) + "\n";
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open model config '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_model_config(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace psmc
