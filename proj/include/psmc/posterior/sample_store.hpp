#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "psmc/model/parameter_space.hpp"

namespace psmc {

struct SampleRecord {
  ParameterVector theta;
  std::uint64_t multiplicity;
  double log_posterior;  // unnormalised
  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

/// Post-burn-in chain output with runs of repeated states collapsed into a
/// multiplicity. Invariants: multiplicities sum to total_steps(), and
/// neighbouring records differ in theta.
///
/// Text format (one record per line after the header):
///
///     # psmc sample store v1
///     # parameters: k1,k2
///     # burn_in: 50000
///     # seed: 7
///     step_index_start,k1,k2,multiplicity,log_posterior
///     0,0.51,12.2,3,-14.08
///     3,0.52,12.1,1,-13.95
///
/// step_index_start is the 0-based post-burn-in step at which the record
/// begins. Reals are printed in shortest round-trip form, so a store that is
/// written and read back compares equal.
class SampleStore {
 public:
  SampleStore() = default;
  explicit SampleStore(std::vector<std::string> parameter_names, std::uint64_t burn_in = 0,
                       std::uint64_t seed = 0);

  /// Adds one chain step, merging it into the last record when theta repeats.
  void append(const ParameterVector& theta, double log_posterior);

  const std::vector<std::string>& parameter_names() const { return names_; }
  std::size_t dims() const { return names_.size(); }
  const std::vector<SampleRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::uint64_t total_steps() const { return total_steps_; }
  std::uint64_t burn_in() const { return burn_in_; }
  std::uint64_t seed() const { return seed_; }

  /// Multiplicity-expanded history of the first `max_steps` steps, row-major
  /// (steps x dims).
  std::vector<double> expanded(std::uint64_t max_steps = UINT64_MAX) const;
  /// Distinct records only, row-major (records x dims).
  std::vector<double> distinct() const;

  void write(std::ostream& out) const;
  static SampleStore read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static SampleStore load(const std::filesystem::path& path);

  friend bool operator==(const SampleStore&, const SampleStore&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<SampleRecord> records_;
  std::uint64_t burn_in_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t total_steps_ = 0;
};

}  // namespace psmc
