#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "psmc/smc/sources.hpp"

namespace psmc {

/// Test of H0: P >= r + delta against H1: P <= r - delta with error at most
/// epsilon.
struct HypothesisSpec {
  double r;
  double delta;
  double epsilon;

  /// r, epsilon in (0,1), delta in (0, min(r, 1 - r)).
  void validate() const;
};

enum class Decision { kH0, kH1, kUndecided };

std::string to_string(Decision d);

enum class StopReason { kDecided, kCapReached, kExhausted };

struct TestOutcome {
  Decision decision;
  std::uint64_t n;  // samples consumed
  std::uint64_t successes;
  StopReason reason = StopReason::kDecided;
  /// Sample index at which a boundary was first crossed; equals n except in
  /// batch mode, where n is rounded up to the end of the batch.
  std::uint64_t decided_at = 0;

  double p_hat() const { return n ? static_cast<double>(successes) / static_cast<double>(n) : 0.0; }
};

struct FixedTestPlan {
  std::uint64_t N;
  double gamma_used;
};

struct SequentialTestPlan {
  double M;
  double gamma_used;
  std::optional<std::uint64_t> max_samples;
  std::uint64_t batch_size = 1;
};

FixedTestPlan plan_fixed_test(const HypothesisSpec& spec, double gamma);
SequentialTestPlan plan_sequential_test(const HypothesisSpec& spec, double gamma,
                                        std::optional<std::uint64_t> max_samples = std::nullopt,
                                        std::uint64_t batch_size = 1);

/// Counts successes over exactly N samples and decides H0 iff S >= N r.
/// Throws DataError if the source runs dry first.
TestOutcome fixed_test(const HypothesisSpec& spec, const FixedTestPlan& plan, SatisfactionSource& source);

/// Stops at the first n with S >= n r + M (H0) or S <= n r - M (H1).
/// With batch_size > 1 samples are drawn a whole batch at a time and the
/// stopping rule is applied once the batch is in: the decision and
/// decided_at match the one-at-a-time test, while n and S cover the full
/// batch. Hitting max_samples or draining a finite source gives kUndecided.
TestOutcome sequential_test(const HypothesisSpec& spec, const SequentialTestPlan& plan,
                            SatisfactionSource& source);

}  // namespace psmc
