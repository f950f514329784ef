#include "psmc/smc/sources.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "psmc/error.hpp"

namespace psmc {

std::optional<SatisfactionRun> VectorSource::next(std::uint64_t max_count) {
  if (pos_ >= outcomes_.size()) return std::nullopt;
  const bool value = outcomes_[pos_];
  std::uint64_t count = 0;
  while (pos_ < outcomes_.size() && outcomes_[pos_] == value && count < max_count) {
    ++pos_;
    ++count;
  }
  return SatisfactionRun{value, count};
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(jobs, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

StoreSource::StoreSource(const SampleStore& store, ThetaPredicate verify, unsigned jobs,
                         std::size_t chunk_records)
    : store_(store),
      verify_(std::move(verify)),
      jobs_(jobs),
      chunk_records_(std::max<std::size_t>(1, chunk_records)),
      outcomes_(store.records().size(), 0) {}

void StoreSource::fill_chunk() {
  const auto& records = store_.records();
  const std::size_t end = std::min(records.size(), verified_end_ + chunk_records_);
  // distinct thetas in this chunk that are not cached yet, in first-seen order
  std::vector<const std::vector<double>*> pending;
  std::map<std::vector<double>, std::size_t> slot;
  for (std::size_t i = verified_end_; i < end; ++i) {
    const auto& values = records[i].theta.as_vector();
    if (cache_.count(values) || slot.count(values)) continue;
    slot.emplace(values, pending.size());
    pending.push_back(&values);
  }
  std::vector<char> results(pending.size(), 0);
  parallel_for(pending.size(), jobs_, [&](std::size_t k) {
    results[k] = verify_(ParameterVector(*pending[k])) ? 1 : 0;
  });
  verifications_ += pending.size();
  for (std::size_t k = 0; k < pending.size(); ++k) cache_.emplace(*pending[k], results[k] != 0);
  for (std::size_t i = verified_end_; i < end; ++i) {
    outcomes_[i] = cache_.at(records[i].theta.as_vector()) ? 1 : 0;
  }
  verified_end_ = end;
}

std::optional<SatisfactionRun> StoreSource::next(std::uint64_t max_count) {
  const auto& records = store_.records();
  if (record_ >= records.size()) return std::nullopt;
  if (record_ >= verified_end_) fill_chunk();
  const std::uint64_t left = records[record_].multiplicity - used_in_record_;
  const std::uint64_t take = std::min(left, max_count);
  const bool satisfied = outcomes_[record_] != 0;
  used_in_record_ += take;
  if (used_in_record_ == records[record_].multiplicity) {
    ++record_;
    used_in_record_ = 0;
  }
  return SatisfactionRun{satisfied, take};
}

std::optional<SatisfactionRun> LiveChainSource::next(std::uint64_t) {
  chain_.step();
  const auto& theta = chain_.state().theta;
  if (!last_theta_ || !(*last_theta_ == theta)) {
    last_outcome_ = verify_(theta);
    ++verifications_;
    last_theta_ = theta;
  }
  return SatisfactionRun{last_outcome_, 1};
}

ProbabilityEstimate estimate_probability(const SampleStore& store, const ThetaPredicate& verify, unsigned jobs) {
  if (store.empty()) throw DataError("cannot estimate a probability from an empty sample store");
  StoreSource source(store, verify, jobs, std::max<std::size_t>(store.records().size(), 1));
  std::uint64_t n = 0;
  std::uint64_t s = 0;
  while (auto run = source.next(UINT64_MAX)) {
    n += run->count;
    if (run->satisfied) s += run->count;
  }
  return {static_cast<double>(s) / static_cast<double>(n), n, s, source.verifications()};
}

}  // namespace psmc
