#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "psmc/posterior/chain.hpp"
#include "psmc/posterior/sample_store.hpp"

namespace psmc {

/// A run of `count` consecutive samples sharing one verification outcome.
struct SatisfactionRun {
  bool satisfied;
  std::uint64_t count;
};

/// Stream of verified samples consumed by the hypothesis tests. Runs let a
/// store hand over a whole multiplicity at once.
class SatisfactionSource {
 public:
  virtual ~SatisfactionSource() = default;
  /// Next run of at most `max_count` samples (max_count >= 1); nullopt when
  /// the source is exhausted.
  virtual std::optional<SatisfactionRun> next(std::uint64_t max_count) = 0;
};

class VectorSource final : public SatisfactionSource {
 public:
  explicit VectorSource(std::vector<bool> outcomes) : outcomes_(std::move(outcomes)) {}
  std::optional<SatisfactionRun> next(std::uint64_t max_count) override;

 private:
  std::vector<bool> outcomes_;
  std::size_t pos_ = 0;
};

/// Unbounded source driven by a callable producing one outcome per call.
class GeneratorSource final : public SatisfactionSource {
 public:
  explicit GeneratorSource(std::function<bool()> generate) : generate_(std::move(generate)) {}
  std::optional<SatisfactionRun> next(std::uint64_t) override { return SatisfactionRun{generate_(), 1}; }

 private:
  std::function<bool()> generate_;
};

using ThetaPredicate = std::function<bool(const ParameterVector&)>;

/// Runs `body(i)` for i in [0, count) on up to `jobs` threads (0 = hardware
/// concurrency). Exceptions are rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

/// Replays a stored chain. Each distinct theta is verified at most once;
/// verification runs ahead in parallel chunks of records, and the outcomes
/// are handed out in store order, so decisions do not depend on `jobs`.
class StoreSource final : public SatisfactionSource {
 public:
  StoreSource(const SampleStore& store, ThetaPredicate verify, unsigned jobs = 1,
              std::size_t chunk_records = 256);
  std::optional<SatisfactionRun> next(std::uint64_t max_count) override;

  /// Number of predicate calls made so far.
  std::uint64_t verifications() const { return verifications_; }

 private:
  void fill_chunk();

  const SampleStore& store_;
  ThetaPredicate verify_;
  unsigned jobs_;
  std::size_t chunk_records_;
  std::map<std::vector<double>, bool> cache_;
  std::vector<char> outcomes_;  // per record, valid below verified_end_
  std::size_t verified_end_ = 0;
  std::size_t record_ = 0;
  std::uint64_t used_in_record_ = 0;
  std::uint64_t verifications_ = 0;
};

/// Samples straight from a running chain: each call advances the chain one
/// step and verifies the new state. Rejected proposals repeat the previous
/// theta, whose outcome is reused.
class LiveChainSource final : public SatisfactionSource {
 public:
  LiveChainSource(MetropolisChain& chain, ThetaPredicate verify) : chain_(chain), verify_(std::move(verify)) {}
  std::optional<SatisfactionRun> next(std::uint64_t) override;

  std::uint64_t verifications() const { return verifications_; }

 private:
  MetropolisChain& chain_;
  ThetaPredicate verify_;
  std::optional<ParameterVector> last_theta_;
  bool last_outcome_ = false;
  std::uint64_t verifications_ = 0;
};

struct ProbabilityEstimate {
  double p_hat;
  std::uint64_t n;  // sum of multiplicities
  std::uint64_t satisfied;
  std::uint64_t distinct_verified;
};

/// Multiplicity-weighted fraction of stored states satisfying `verify`.
/// Throws DataError on an empty store.
ProbabilityEstimate estimate_probability(const SampleStore& store, const ThetaPredicate& verify,
                                         unsigned jobs = 1);

}  // namespace psmc
