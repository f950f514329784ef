#pragma once

#include <span>
#include <string>
#include <vector>

namespace psmc {

enum class Interpolation { kLinear, kConstant };

struct Breakpoint {
  double time;
  double value;
  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Externally imposed input u(t) given as an interpolation table in minutes.
/// Outside the table the signal is held at the nearest endpoint value.
class InputSignal {
 public:
  InputSignal() = default;
  InputSignal(std::vector<Breakpoint> points, Interpolation interpolation);

  static InputSignal constant(double value);

  double at(double t) const;
  /// Value at t using the piece that contains `anchor`, so the right end of a
  /// piece sees its left-hand limit rather than the next piece.
  double at(double t, double anchor) const;

  const std::vector<Breakpoint>& breakpoints() const { return points_; }
  Interpolation interpolation() const { return interpolation_; }

  friend bool operator==(const InputSignal&, const InputSignal&) = default;

 private:
  std::vector<Breakpoint> points_;
  Interpolation interpolation_ = Interpolation::kLinear;
};

std::string to_string(Interpolation interpolation);
Interpolation interpolation_from_string(const std::string& text);

}  // namespace psmc
