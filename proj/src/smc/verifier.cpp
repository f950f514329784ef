#include "psmc/smc/verifier.hpp"

#include "psmc/bltl/evaluator.hpp"

namespace psmc {

bool verify_sample(const OdeSystem& system, const ParameterVector& theta, const TimeGrid& grid,
                   const bltl::Formula& formula, const StepControl& control, IntegrationFailure* failure) {
  auto result = integrate(system, theta, grid, control);
  if (!result.ok()) {
    if (failure) *failure = result.failure();
    return false;
  }
  return bltl::satisfies(formula, result.trajectory());
}

Verifier::Verifier(OdeSystem system, TimeGrid grid, bltl::Formula formula, StepControl control,
                   std::size_t log_limit)
    : system_(std::move(system)),
      grid_(std::move(grid)),
      formula_(std::move(formula)),
      control_(control),
      log_limit_(log_limit) {}

bool Verifier::operator()(const ParameterVector& theta) const {
  IntegrationFailure failure{0.0, {}};
  const bool ok = verify_sample(system_, theta, grid_, formula_, control_, &failure);
  if (!failure.reason.empty()) {
    std::lock_guard lock(mutex_);
    ++failure_count_;
    if (failures_.size() < log_limit_) failures_.push_back({theta, failure});
  }
  return ok;
}

std::uint64_t Verifier::failure_count() const {
  std::lock_guard lock(mutex_);
  return failure_count_;
}

std::vector<FailureRecord> Verifier::failures() const {
  std::lock_guard lock(mutex_);
  return failures_;
}

}  // namespace psmc
