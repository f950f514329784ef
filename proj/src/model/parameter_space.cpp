#include "psmc/model/parameter_space.hpp"

#include <cmath>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc {

ParameterSpace::ParameterSpace(std::vector<std::string> names, std::vector<Interval> bounds)
    : names_(std::move(names)), bounds_(std::move(bounds)) {
  if (bounds_.empty()) {
    throw ValidationError("parameter space must have at least one dimension");
  }
  if (names_.size() != bounds_.size()) {
    throw ValidationError(fmt::format("parameter space has {} names but {} bounds",
                                      names_.size(), bounds_.size()));
  }
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    const auto& b = bounds_[i];
    if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || !(b.lower < b.upper)) {
      throw ValidationError(fmt::format("parameter '{}' has invalid bounds [{}, {}]",
                                        names_[i], b.lower, b.upper));
    }
  }
}

bool ParameterSpace::contains(const ParameterVector& theta) const {
  if (theta.size() != dims()) return false;
  for (std::size_t i = 0; i < dims(); ++i) {
    if (!bounds_[i].contains(theta[i])) return false;
  }
  return true;
}

void ParameterSpace::validate(const ParameterVector& theta) const {
  if (theta.size() != dims()) {
    throw ValidationError(fmt::format("parameter vector has {} entries, expected {}",
                                      theta.size(), dims()));
  }
  for (std::size_t i = 0; i < dims(); ++i) {
    if (!bounds_[i].contains(theta[i])) {
      throw ValidationError(fmt::format("parameter '{}' = {} lies outside [{}, {}]", names_[i],
                                        theta[i], bounds_[i].lower, bounds_[i].upper));
    }
  }
}

double ParameterSpace::log_volume() const {
  double sum = 0.0;
  for (const auto& b : bounds_) sum += std::log(b.width());
  return sum;
}

}  // namespace psmc
