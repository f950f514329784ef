#include "psmc/smc/hypothesis_test.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "psmc/error.hpp"
#include "psmc/smc/sample_size.hpp"

namespace psmc {

void HypothesisSpec::validate() const {
  if (!(r > 0.0 && r < 1.0)) throw ValidationError(fmt::format("r must lie in (0, 1), got {}", r));
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError(fmt::format("epsilon must lie in (0, 1), got {}", epsilon));
  }
  if (!(delta > 0.0 && delta < std::min(r, 1.0 - r))) {
    throw ValidationError(fmt::format("delta must lie in (0, {}), got {}", std::min(r, 1.0 - r), delta));
  }
}

std::string to_string(Decision d) {
  switch (d) {
    case Decision::kH0: return "H0";
    case Decision::kH1: return "H1";
    case Decision::kUndecided: return "undecided";
  }
  return "?";
}

FixedTestPlan plan_fixed_test(const HypothesisSpec& spec, double gamma) {
  spec.validate();
  return {fixed_sample_size(spec.epsilon, spec.delta, gamma), gamma};
}

SequentialTestPlan plan_sequential_test(const HypothesisSpec& spec, double gamma,
                                        std::optional<std::uint64_t> max_samples, std::uint64_t batch_size) {
  spec.validate();
  if (batch_size == 0) throw ValidationError("batch size must be positive");
  if (max_samples && *max_samples == 0) throw ValidationError("sample cap must be positive");
  return {sequential_threshold(spec.epsilon, spec.delta, gamma, spec.r), gamma, max_samples, batch_size};
}

TestOutcome fixed_test(const HypothesisSpec& spec, const FixedTestPlan& plan, SatisfactionSource& source) {
  spec.validate();
  if (plan.N == 0) throw ValidationError("fixed test needs N > 0");
  std::uint64_t n = 0;
  std::uint64_t s = 0;
  while (n < plan.N) {
    auto run = source.next(plan.N - n);
    if (!run) {
      throw DataError(fmt::format("sample source exhausted after {} of {} samples (short by {})", n, plan.N,
                                  plan.N - n));
    }
    const std::uint64_t take = std::min(run->count, plan.N - n);
    n += take;
    if (run->satisfied) s += take;
  }
  const bool h0 = static_cast<double>(s) >= static_cast<double>(plan.N) * spec.r;
  return {h0 ? Decision::kH0 : Decision::kH1, n, s, StopReason::kDecided, n};
}

TestOutcome sequential_test(const HypothesisSpec& spec, const SequentialTestPlan& plan,
                            SatisfactionSource& source) {
  spec.validate();
  if (!(plan.M > 0.0)) throw ValidationError("sequential test needs M > 0");
  if (plan.batch_size == 0) throw ValidationError("batch size must be positive");
  const std::uint64_t cap = plan.max_samples.value_or(std::numeric_limits<std::uint64_t>::max());
  const double r = spec.r;
  const double M = plan.M;

  std::uint64_t n = 0;
  std::uint64_t s = 0;
  std::optional<Decision> decision;
  std::uint64_t decided_at = 0;
  // after a decision, keep drawing only to complete the current batch
  auto batch_done = [&] { return n % plan.batch_size == 0 || n == cap; };

  while (n < cap && !(decision && batch_done())) {
    const std::uint64_t want = decision ? plan.batch_size - n % plan.batch_size : cap - n;
    auto run = source.next(std::min(want, cap - n));
    if (!run) break;
    const std::uint64_t take = std::min(run->count, cap - n);
    if (decision) {
      n += take;
      if (run->satisfied) s += take;
      continue;
    }
    for (std::uint64_t k = 0; k < take; ++k) {
      ++n;
      if (run->satisfied) ++s;
      const double nr = static_cast<double>(n) * r;
      const double sd = static_cast<double>(s);
      if (sd >= nr + M) {
        decision = Decision::kH0;
      } else if (sd <= nr - M) {
        decision = Decision::kH1;
      }
      if (decision) {
        decided_at = n;
        // the rest of this run still belongs to the batch being verified
        const std::uint64_t rest = take - k - 1;
        const std::uint64_t fill = std::min(rest, (plan.batch_size - n % plan.batch_size) % plan.batch_size);
        n += fill;
        if (run->satisfied) s += fill;
        break;
      }
    }
  }
  if (decision) return {*decision, n, s, StopReason::kDecided, decided_at};
  return {Decision::kUndecided, n, s, n >= cap ? StopReason::kCapReached : StopReason::kExhausted, n};
}

}  // namespace psmc
