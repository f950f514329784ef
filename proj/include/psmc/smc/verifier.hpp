#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "psmc/bltl/formula.hpp"
#include "psmc/model/integrator.hpp"

namespace psmc {

/// Indicator of trajectory(theta) |= formula. An integration failure counts
/// as "not satisfied" and is returned through `failure` when given.
bool verify_sample(const OdeSystem& system, const ParameterVector& theta, const TimeGrid& grid,
                   const bltl::Formula& formula, const StepControl& control = {},
                   IntegrationFailure* failure = nullptr);

struct FailureRecord {
  ParameterVector theta;
  IntegrationFailure failure;
};

/// Thread-safe verifier bound to one model condition and one formula. Keeps
/// an audit log of integration failures (first `log_limit` entries; the
/// count is always exact).
class Verifier {
 public:
  Verifier(OdeSystem system, TimeGrid grid, bltl::Formula formula, StepControl control = {},
           std::size_t log_limit = 1000);

  bool operator()(const ParameterVector& theta) const;

  std::uint64_t failure_count() const;
  std::vector<FailureRecord> failures() const;

 private:
  OdeSystem system_;
  TimeGrid grid_;
  bltl::Formula formula_;
  StepControl control_;
  std::size_t log_limit_;
  mutable std::mutex mutex_;
  mutable std::vector<FailureRecord> failures_;
  mutable std::uint64_t failure_count_ = 0;
};

}  // namespace psmc
