#include "psmc/posterior/observations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc {

ObservationSet::ObservationSet(std::vector<Observation> records) : records_(std::move(records)) {
  for (const auto& r : records_) {
    if (!std::isfinite(r.time) || !std::isfinite(r.value)) {
      throw DataError(fmt::format("observation at t={} of condition '{}' is not finite", r.time, r.condition));
    }
    if (!(r.sigma > 0.0) || !std::isfinite(r.sigma)) {
      throw DataError(fmt::format("observation at t={} of condition '{}' has sigma {} (must be > 0)",
                                  r.time, r.condition, r.sigma));
    }
  }
}

std::vector<std::string> ObservationSet::conditions() const {
  std::vector<std::string> out;
  for (const auto& r : records_) {
    if (std::find(out.begin(), out.end(), r.condition) == out.end()) out.push_back(r.condition);
  }
  return out;
}

std::vector<Observation> ObservationSet::for_condition(const std::string& condition) const {
  std::vector<Observation> out;
  std::copy_if(records_.begin(), records_.end(), std::back_inserter(out),
               [&](const Observation& r) { return r.condition == condition; });
  return out;
}

void ObservationSet::validate(const ConditionSet& systems, const TimeGrid& grid) const {
  for (const auto& r : records_) {
    auto it = systems.find(r.condition);
    if (it == systems.end()) {
      throw DataError(fmt::format("observation refers to unknown condition '{}'", r.condition));
    }
    if (r.observable >= it->second.output_dim()) {
      throw DataError(fmt::format("observation refers to observable {} but the model has {}",
                                  r.observable + 1, it->second.output_dim()));
    }
    try {
      (void)grid.index_of(r.time);
    } catch (const ValidationError& e) {
      throw DataError(fmt::format("observation of condition '{}': {}", r.condition, e.what()));
    }
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line, const char* column) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw DataError(fmt::format("line {}: column '{}' value '{}' is not a number", line, column, s));
  }
  return v;
}

}  // namespace

ObservationSet parse_observations_csv(const std::string& text,
                                      std::span<const std::string> observable_names) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<Observation> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line);
    if (!header_seen) {
      const std::vector<std::string> expected{"condition", "observable", "time_min", "value", "sigma"};
      if (fields != expected) {
        throw DataError(fmt::format("line {}: expected header 'condition,observable,time_min,value,sigma'", line_no));
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 5) {
      throw DataError(fmt::format("line {}: expected 5 fields, found {}", line_no, fields.size()));
    }
    Observation obs;
    obs.condition = fields[0];
    auto named = std::find(observable_names.begin(), observable_names.end(), fields[1]);
    if (named != observable_names.end()) {
      obs.observable = static_cast<std::size_t>(named - observable_names.begin());
    } else {
      std::size_t index = 0;
      auto [end, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), index);
      if (ec != std::errc() || end != fields[1].data() + fields[1].size() || index == 0 ||
          index > observable_names.size()) {
        throw DataError(fmt::format("line {}: unknown observable '{}'", line_no, fields[1]));
      }
      obs.observable = index - 1;
    }
    obs.time = to_double(fields[2], line_no, "time_min");
    obs.value = to_double(fields[3], line_no, "value");
    obs.sigma = to_double(fields[4], line_no, "sigma");
    if (!(obs.sigma > 0.0)) {
      throw DataError(fmt::format("line {}: sigma must be positive", line_no));
    }
    records.push_back(std::move(obs));
  }
  if (!header_seen) throw DataError("observation file is empty");
  return ObservationSet(std::move(records));
}

ObservationSet load_observations_csv(const std::filesystem::path& path,
                                     std::span<const std::string> observable_names) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open data file '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_observations_csv(buffer.str(), observable_names);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace psmc
