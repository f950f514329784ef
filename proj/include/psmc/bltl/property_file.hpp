#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "psmc/bltl/formula.hpp"

namespace psmc::bltl {

/// One named property: verify P(formula) >= r with indifference region delta,
/// simulating under the inputs of `condition`.
struct Property {
  std::string name;
  double r;
  double delta;
  std::string condition;
  std::string text;
  Formula formula;
};

/// Property files hold one entry per line:
///
///     name: r, delta, condition, formula
///
/// Blank lines and lines starting with '#' are ignored. Errors carry the
/// line number.
std::vector<Property> parse_properties(const std::string& text,
                                       std::span<const std::string> state_names);
std::vector<Property> load_properties(const std::filesystem::path& path,
                                      std::span<const std::string> state_names);

const Property& find_property(const std::vector<Property>& properties, const std::string& name);

}  // namespace psmc::bltl
