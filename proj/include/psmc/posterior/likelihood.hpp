#pragma once

#include <functional>
#include <string>
#include <vector>

#include "psmc/model/integrator.hpp"
#include "psmc/posterior/observations.hpp"

namespace psmc {

/// log p(Y | theta) up to an additive constant; -infinity means zero likelihood.
using LogLikelihood = std::function<double(const ParameterVector&)>;

/// Gaussian measurement likelihood of an ODE model:
///
///     -sum_ij ((Y_ij - y_i(t_j)|theta) / (sqrt(2) sigma_ij))^2
///
/// with one simulation per experimental condition. The normalising constant
/// is dropped. Integration failure yields -infinity.
class OdeLikelihood {
 public:
  /// Throws DataError when the data do not fit the model or the grid.
  OdeLikelihood(ConditionSet systems, TimeGrid grid, const ObservationSet& data,
                StepControl control = {});

  double operator()(const ParameterVector& theta) const;

  const TimeGrid& grid() const { return grid_; }

 private:
  struct Term {
    std::size_t grid_index;
    std::size_t observable;
    double value;
    double inv_scaled_sigma;  // 1 / (sqrt(2) sigma)
  };
  struct Condition {
    OdeSystem system;
    std::vector<Term> terms;
  };

  std::vector<Condition> conditions_;
  TimeGrid grid_;
  StepControl control_;
};

/// One-shot evaluation of the same quantity.
double log_likelihood(const ConditionSet& systems, const ParameterVector& theta,
                      const ObservationSet& data, const TimeGrid& grid,
                      const StepControl& control = {});

}  // namespace psmc
