#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "psmc/model/ode_system.hpp"

namespace psmc {

/// One measured data point Y_ij with its standard deviation.
struct Observation {
  std::string condition;
  /// 0-based index into the model's observables.
  std::size_t observable;
  double time;
  double value;
  double sigma;
  friend bool operator==(const Observation&, const Observation&) = default;
};

class ObservationSet {
 public:
  ObservationSet() = default;
  /// Throws DataError for a non-positive or non-finite sigma, or a non-finite
  /// time or value.
  explicit ObservationSet(std::vector<Observation> records);

  const std::vector<Observation>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Distinct condition names in order of first appearance.
  std::vector<std::string> conditions() const;
  std::vector<Observation> for_condition(const std::string& condition) const;

  /// Every condition exists, every observable index is valid and every
  /// time lies on `grid`. Throws DataError naming the offending record.
  void validate(const ConditionSet& systems, const TimeGrid& grid) const;

 private:
  std::vector<Observation> records_;
};

/// Reads CSV with header `condition,observable,time_min,value,sigma`. The
/// observable column holds an observable name or a 1-based index.
ObservationSet parse_observations_csv(const std::string& text,
                                      std::span<const std::string> observable_names);
ObservationSet load_observations_csv(const std::filesystem::path& path,
                                     std::span<const std::string> observable_names);

}  // namespace psmc
