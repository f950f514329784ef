#include "psmc/posterior/likelihood.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace psmc {

OdeLikelihood::OdeLikelihood(ConditionSet systems, TimeGrid grid, const ObservationSet& data,
                             StepControl control)
    : grid_(std::move(grid)), control_(control) {
  data.validate(systems, grid_);
  for (const auto& name : data.conditions()) {
    Condition cond{systems.at(name), {}};
    for (const auto& obs : data.for_condition(name)) {
      cond.terms.push_back({grid_.index_of(obs.time), obs.observable, obs.value,
                            1.0 / (std::numbers::sqrt2 * obs.sigma)});
    }
    conditions_.push_back(std::move(cond));
  }
}

double OdeLikelihood::operator()(const ParameterVector& theta) const {
  double sum = 0.0;
  for (const auto& cond : conditions_) {
    const auto result = integrate(cond.system, theta, grid_, control_);
    if (!result.ok()) return -std::numeric_limits<double>::infinity();
    const auto& traj = result.trajectory();
    for (const auto& term : cond.terms) {
      const double predicted = cond.system.observables()[term.observable].apply(traj.row(term.grid_index));
      const double z = (term.value - predicted) * term.inv_scaled_sigma;
      sum += z * z;
    }
  }
  return -sum;
}

double log_likelihood(const ConditionSet& systems, const ParameterVector& theta,
                      const ObservationSet& data, const TimeGrid& grid, const StepControl& control) {
  return OdeLikelihood(systems, grid, data, control)(theta);
}

}  // namespace psmc
