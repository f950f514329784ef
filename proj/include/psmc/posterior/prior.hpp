#pragma once

#include "psmc/model/parameter_space.hpp"
#include "psmc/posterior/rng.hpp"

namespace psmc {

/// Uniform density over a parameter box: log p0 = -sum log(b_i - a_i)
/// inside, -infinity outside.
class UniformBoxPrior {
 public:
  explicit UniformBoxPrior(ParameterSpace space);

  const ParameterSpace& space() const { return space_; }

  /// Throws ValidationError on a dimension mismatch.
  double log_density(const ParameterVector& theta) const;

  ParameterVector sample(CounterRng& rng) const;

 private:
  ParameterSpace space_;
  double log_density_inside_;
};

}  // namespace psmc
