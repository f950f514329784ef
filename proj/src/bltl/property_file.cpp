#include "psmc/bltl/property_file.hpp"

#include <algorithm>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "psmc/bltl/parser.hpp"
#include "psmc/error.hpp"

namespace psmc::bltl {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double number_field(const std::string& field, const char* what, std::size_t line) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || end != field.data() + field.size()) {
    throw ConfigError(fmt::format("property file line {}: {} '{}' is not a number", line, what, field));
  }
  return v;
}

}  // namespace

std::vector<Property> parse_properties(const std::string& text,
                                       std::span<const std::string> state_names) {
  std::vector<Property> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ConfigError(fmt::format("property file line {}: expected 'name: r, delta, condition, formula'", line_no));
    }
    Property p{trim(line.substr(0, colon)), 0, 0, {}, {}, Formula::truth()};
    std::string rest = line.substr(colon + 1);
    std::vector<std::string> fields;
    for (int k = 0; k < 3; ++k) {
      const auto comma = rest.find(',');
      if (comma == std::string::npos) {
        throw ConfigError(fmt::format("property file line {}: expected 'name: r, delta, condition, formula'", line_no));
      }
      fields.push_back(trim(rest.substr(0, comma)));
      rest = rest.substr(comma + 1);
    }
    p.r = number_field(fields[0], "r", line_no);
    p.delta = number_field(fields[1], "delta", line_no);
    if (!(p.r > 0.0 && p.r < 1.0)) {
      throw ConfigError(fmt::format("property file line {}: r must lie in (0, 1)", line_no));
    }
    if (!(p.delta > 0.0 && p.delta < std::min(p.r, 1.0 - p.r))) {
      throw ConfigError(fmt::format("property file line {}: delta must lie in (0, min(r, 1 - r))", line_no));
    }
    p.condition = fields[2];
    p.text = trim(rest);
    if (p.name.empty()) throw ConfigError(fmt::format("property file line {}: empty name", line_no));
    if (!seen.insert(p.name).second) {
      throw ConfigError(fmt::format("property file line {}: duplicate property '{}'", line_no, p.name));
    }
    try {
      p.formula = parse(p.text, state_names);
    } catch (const ParseError& e) {
      throw ConfigError(fmt::format("property file line {}: {}", line_no, e.what()));
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Property> load_properties(const std::filesystem::path& path,
                                      std::span<const std::string> state_names) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open property file '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_properties(buffer.str(), state_names);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

const Property& find_property(const std::vector<Property>& properties, const std::string& name) {
  for (const auto& p : properties) {
    if (p.name == name) return p;
  }
  throw ConfigError(fmt::format("no property named '{}'", name));
}

}  // namespace psmc::bltl
