#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "psmc/model/ode_system.hpp"

namespace psmc {

/// Error control for the adaptive stepper.
struct StepControl {
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  /// Steps shorter than min_step * max(1, |t|) count as underflow.
  double min_step = 1e-12;
  std::size_t max_steps = 200000;

  void validate() const;
};

struct IntegrationFailure {
  double time;
  std::string reason;
};

class IntegrationResult {
 public:
  IntegrationResult(Trajectory trajectory) : value_(std::move(trajectory)) {}
  IntegrationResult(IntegrationFailure failure) : value_(std::move(failure)) {}

  bool ok() const { return std::holds_alternative<Trajectory>(value_); }
  explicit operator bool() const { return ok(); }

  /// Throws Error carrying the failure time when the integration failed.
  const Trajectory& trajectory() const;
  const IntegrationFailure& failure() const { return std::get<IntegrationFailure>(value_); }

 private:
  std::variant<Trajectory, IntegrationFailure> value_;
};

/// Integrates `system` with the Dormand-Prince 5(4) pair and reports states
/// exactly at the grid times. The stepper also stops on every input
/// breakpoint so kinks in u(t) never fall inside a step.
///
/// Pure: identical arguments give bit-identical trajectories.
IntegrationResult integrate(const OdeSystem& system, const ParameterVector& theta,
                            const TimeGrid& grid, const StepControl& control = {});

}  // namespace psmc
