#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace psmc {

/// A point in parameter space. Thin wrapper so parameter vectors are not
/// confused with state vectors or outputs.
class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(std::vector<double> values) : values_(std::move(values)) {}
  ParameterVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const std::vector<double>& as_vector() const { return values_; }

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;

 private:
  std::vector<double> values_;
};

struct Interval {
  double lower;
  double upper;

  double width() const { return upper - lower; }
  bool contains(double x) const { return lower <= x && x <= upper; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// The box of admissible parameters, a product of closed intervals.
class ParameterSpace {
 public:
  ParameterSpace() = default;
  ParameterSpace(std::vector<std::string> names, std::vector<Interval> bounds);

  std::size_t dims() const { return bounds_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Interval>& bounds() const { return bounds_; }

  bool contains(const ParameterVector& theta) const;

  /// Throws ValidationError on a dimension mismatch or a point outside the box.
  void validate(const ParameterVector& theta) const;

  /// Sum of log interval widths.
  double log_volume() const;

  friend bool operator==(const ParameterSpace&, const ParameterSpace&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<Interval> bounds_;
};

}  // namespace psmc
