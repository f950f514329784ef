#include "psmc/posterior/prior.hpp"

#include <limits>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc {

UniformBoxPrior::UniformBoxPrior(ParameterSpace space)
    : space_(std::move(space)), log_density_inside_(-space_.log_volume()) {}

double UniformBoxPrior::log_density(const ParameterVector& theta) const {
  if (theta.size() != space_.dims()) {
    throw ValidationError(fmt::format("prior expects {} parameters, got {}", space_.dims(), theta.size()));
  }
  return space_.contains(theta) ? log_density_inside_ : -std::numeric_limits<double>::infinity();
}

ParameterVector UniformBoxPrior::sample(CounterRng& rng) const {
  std::vector<double> values(space_.dims());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& b = space_.bounds()[i];
    values[i] = b.lower + rng.uniform() * b.width();
  }
  return ParameterVector(std::move(values));
}

}  // namespace psmc
