#include "psmc/model/ode_system.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc {

double ObservationForm::apply(std::span<const double> state) const {
  double sum = 0.0;
  for (const auto& [index, coefficient] : terms) sum += coefficient * state[index];
  return scale * sum;
}

OdeSystem::OdeSystem(std::vector<std::string> state_names, std::vector<double> initial_state,
                     std::vector<std::string> input_names, std::vector<InputSignal> inputs,
                     VectorField vector_field, std::vector<ObservationForm> observables,
                     ParameterSpace space)
    : state_names_(std::move(state_names)),
      initial_state_(std::move(initial_state)),
      input_names_(std::move(input_names)),
      inputs_(std::move(inputs)),
      vector_field_(std::move(vector_field)),
      observables_(std::move(observables)),
      space_(std::move(space)) {
  check();
}

void OdeSystem::check() const {
  if (state_names_.empty()) throw ValidationError("ODE system needs at least one state");
  if (initial_state_.size() != state_names_.size()) {
    throw ValidationError(fmt::format("initial state has {} entries for {} states",
                                      initial_state_.size(), state_names_.size()));
  }
  for (double x : initial_state_) {
    if (!std::isfinite(x)) throw ValidationError("initial state must be finite");
  }
  if (inputs_.size() != input_names_.size()) {
    throw ValidationError(fmt::format("{} input signals supplied for {} declared inputs",
                                      inputs_.size(), input_names_.size()));
  }
  if (!vector_field_) throw ValidationError("ODE system has no vector field");
  for (const auto& form : observables_) {
    for (const auto& [index, coefficient] : form.terms) {
      if (index >= state_names_.size()) {
        throw ValidationError(fmt::format("observable '{}' references state index {} "
                                          "but the system has {} states",
                                          form.name, index, state_names_.size()));
      }
    }
  }
}

std::size_t OdeSystem::state_index(const std::string& name) const {
  auto it = std::find(state_names_.begin(), state_names_.end(), name);
  if (it == state_names_.end()) throw ValidationError("unknown state '" + name + "'");
  return static_cast<std::size_t>(it - state_names_.begin());
}

OdeSystem OdeSystem::with_inputs(std::vector<InputSignal> inputs) const {
  OdeSystem copy = *this;
  copy.inputs_ = std::move(inputs);
  copy.check();
  return copy;
}

OdeSystem OdeSystem::with_initial_state(std::vector<double> initial_state) const {
  OdeSystem copy = *this;
  copy.initial_state_ = std::move(initial_state);
  copy.check();
  return copy;
}

void OdeSystem::input_values(double t, std::span<double> out) const {
  for (std::size_t i = 0; i < inputs_.size(); ++i) out[i] = inputs_[i].at(t);
}

void OdeSystem::derivative(std::span<const double> state, std::span<const double> theta,
                           double t, std::span<double> dxdt) const {
  derivative(state, theta, t, t, dxdt);
}

void OdeSystem::derivative(std::span<const double> state, std::span<const double> theta,
                           double t, double anchor, std::span<double> dxdt) const {
  // inputs are few; a fixed buffer avoids allocating on every evaluation
  constexpr std::size_t kInline = 8;
  double inline_buffer[kInline];
  std::vector<double> heap;
  std::span<double> u;
  if (inputs_.size() <= kInline) {
    u = std::span<double>(inline_buffer, inputs_.size());
  } else {
    heap.resize(inputs_.size());
    u = heap;
  }
  for (std::size_t i = 0; i < inputs_.size(); ++i) u[i] = inputs_[i].at(t, anchor);
  vector_field_(state, u, theta, t, dxdt);
}

std::vector<double> OdeSystem::input_breakpoints() const {
  std::vector<double> times;
  for (const auto& signal : inputs_) {
    for (const auto& b : signal.breakpoints()) times.push_back(b.time);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw ValidationError("time grid needs at least two points");
  if (times_.front() != 0.0) throw ValidationError("time grid must start at 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !(times_[i - 1] < times_[i])) {
      throw ValidationError(fmt::format("time grid must be strictly increasing (t={} after t={})",
                                        times_[i], times_[i - 1]));
    }
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t points) {
  if (points < 2) throw ValidationError("time grid needs at least two points");
  std::vector<double> times(points);
  for (std::size_t i = 0; i < points; ++i) {
    times[i] = horizon * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return TimeGrid(std::move(times));
}

std::size_t TimeGrid::index_of(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end() || *it != t) {
    throw ValidationError(fmt::format("time {} is not on the simulation grid", t));
  }
  return static_cast<std::size_t>(it - times_.begin());
}

Trajectory::Trajectory(TimeGrid grid, std::size_t state_dim, std::vector<double> states)
    : grid_(std::move(grid)), state_dim_(state_dim), states_(std::move(states)) {
  if (states_.size() != grid_.size() * state_dim_) {
    throw ValidationError(fmt::format("trajectory has {} values, expected {} x {}",
                                      states_.size(), grid_.size(), state_dim_));
  }
}

std::vector<std::vector<double>> observe(const OdeSystem& system, const Trajectory& trajectory,
                                         std::span<const std::size_t> time_indices) {
  if (trajectory.state_dim() != system.state_dim()) {
    throw ValidationError("trajectory does not belong to this system");
  }
  std::vector<std::vector<double>> out(system.output_dim(),
                                       std::vector<double>(time_indices.size()));
  for (std::size_t j = 0; j < time_indices.size(); ++j) {
    if (time_indices[j] >= trajectory.size()) {
      throw ValidationError(fmt::format("time index {} is not on the grid ({} points)",
                                        time_indices[j], trajectory.size()));
    }
    const auto row = trajectory.row(time_indices[j]);
    for (std::size_t i = 0; i < system.output_dim(); ++i) {
      out[i][j] = system.observables()[i].apply(row);
    }
  }
  return out;
}

std::vector<std::vector<double>> observe_at(const OdeSystem& system,
                                            const Trajectory& trajectory,
                                            std::span<const double> times) {
  std::vector<std::size_t> indices;
  indices.reserve(times.size());
  for (double t : times) indices.push_back(trajectory.grid().index_of(t));
  return observe(system, trajectory, indices);
}

}  // namespace psmc
