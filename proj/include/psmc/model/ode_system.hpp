#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psmc/model/input_signal.hpp"
#include "psmc/model/parameter_space.hpp"

namespace psmc {

/// dx/dt = f(x, u, theta, t), written into `dxdt`.
using VectorField = std::function<void(std::span<const double> state,
                                       std::span<const double> inputs,
                                       std::span<const double> theta, double t,
                                       std::span<double> dxdt)>;

/// One observable: scale * sum_k coefficient_k * x[state_k].
struct ObservationForm {
  std::string name;
  std::vector<std::pair<std::size_t, double>> terms;
  double scale = 1.0;

  double apply(std::span<const double> state) const;
  friend bool operator==(const ObservationForm&, const ObservationForm&) = default;
};

/// A parametric ODE system with linear observation map and named inputs.
/// Immutable once built; `with_inputs` returns a copy bound to new signals.
class OdeSystem {
 public:
  OdeSystem(std::vector<std::string> state_names, std::vector<double> initial_state,
            std::vector<std::string> input_names, std::vector<InputSignal> inputs,
            VectorField vector_field, std::vector<ObservationForm> observables,
            ParameterSpace space);

  std::size_t state_dim() const { return state_names_.size(); }
  std::size_t input_dim() const { return input_names_.size(); }
  std::size_t output_dim() const { return observables_.size(); }

  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<std::string>& input_names() const { return input_names_; }
  const std::vector<double>& initial_state() const { return initial_state_; }
  const std::vector<InputSignal>& inputs() const { return inputs_; }
  const std::vector<ObservationForm>& observables() const { return observables_; }
  const ParameterSpace& parameter_space() const { return space_; }

  /// Index of a state by name; throws ValidationError when absent.
  std::size_t state_index(const std::string& name) const;

  OdeSystem with_inputs(std::vector<InputSignal> inputs) const;
  OdeSystem with_initial_state(std::vector<double> initial_state) const;

  void input_values(double t, std::span<double> out) const;
  void derivative(std::span<const double> state, std::span<const double> theta, double t,
                  std::span<double> dxdt) const;
  /// Same, with inputs taken from the pieces containing `anchor`; used by the
  /// stepper so a step ending on a breakpoint never sees the next piece.
  void derivative(std::span<const double> state, std::span<const double> theta, double t,
                  double anchor, std::span<double> dxdt) const;

  /// Every breakpoint time of every input, sorted and deduplicated.
  std::vector<double> input_breakpoints() const;

 private:
  void check() const;

  std::vector<std::string> state_names_;
  std::vector<double> initial_state_;
  std::vector<std::string> input_names_;
  std::vector<InputSignal> inputs_;
  VectorField vector_field_;
  std::vector<ObservationForm> observables_;
  ParameterSpace space_;
};

/// Experimental conditions keyed by name; each binds the inputs differently.
using ConditionSet = std::map<std::string, OdeSystem>;

/// Strictly increasing simulation times in minutes, starting at 0.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times);

  static TimeGrid uniform(double horizon, std::size_t points);

  std::size_t size() const { return times_.size(); }
  double operator[](std::size_t i) const { return times_[i]; }
  double horizon() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }

  /// Index of an exact grid time; throws ValidationError naming the time.
  std::size_t index_of(double t) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  std::vector<double> times_;
};

/// States reported at the grid times; row-major, one row per grid point.
class Trajectory {
 public:
  Trajectory(TimeGrid grid, std::size_t state_dim, std::vector<double> states);

  const TimeGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }
  std::size_t state_dim() const { return state_dim_; }

  std::span<const double> row(std::size_t i) const {
    return {states_.data() + i * state_dim_, state_dim_};
  }
  double value(std::size_t i, std::size_t var) const { return states_[i * state_dim_ + var]; }
  const std::vector<double>& data() const { return states_; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  TimeGrid grid_;
  std::size_t state_dim_;
  std::vector<double> states_;
};

/// Predicted noiseless outputs: result[i][j] is observable i at grid index
/// times[j]. Throws ValidationError for an index not on the grid.
std::vector<std::vector<double>> observe(const OdeSystem& system, const Trajectory& trajectory,
                                         std::span<const std::size_t> time_indices);

/// Same as above but addressed by time; throws naming a time not on the grid.
std::vector<std::vector<double>> observe_at(const OdeSystem& system,
                                            const Trajectory& trajectory,
                                            std::span<const double> times);

}  // namespace psmc
