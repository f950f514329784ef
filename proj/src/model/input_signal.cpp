#include "psmc/model/input_signal.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc {

InputSignal::InputSignal(std::vector<Breakpoint> points, Interpolation interpolation)
    : points_(std::move(points)), interpolation_(interpolation) {
  if (points_.empty()) throw ValidationError("input signal needs at least one breakpoint");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].time) || !std::isfinite(points_[i].value)) {
      throw ValidationError("input signal breakpoints must be finite");
    }
    if (i > 0 && !(points_[i - 1].time < points_[i].time)) {
      throw ValidationError(fmt::format("input signal times must be strictly increasing "
                                        "(t={} follows t={})",
                                        points_[i].time, points_[i - 1].time));
    }
  }
}

InputSignal InputSignal::constant(double value) {
  return InputSignal({{0.0, value}}, Interpolation::kConstant);
}

double InputSignal::at(double t) const {
  if (t <= points_.front().time) return points_.front().value;
  if (t >= points_.back().time) return points_.back().value;
  // first breakpoint strictly after t; t lies in [prev.time, next.time)
  auto next = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double x, const Breakpoint& b) { return x < b.time; });
  auto prev = next - 1;
  if (interpolation_ == Interpolation::kConstant) return prev->value;
  const double w = (t - prev->time) / (next->time - prev->time);
  return prev->value + w * (next->value - prev->value);
}

double InputSignal::at(double t, double anchor) const {
  if (anchor < points_.front().time || anchor >= points_.back().time) return at(t);
  auto next = std::upper_bound(points_.begin(), points_.end(), anchor,
                               [](double x, const Breakpoint& b) { return x < b.time; });
  auto prev = next - 1;
  if (interpolation_ == Interpolation::kConstant) return prev->value;
  const double w = std::clamp((t - prev->time) / (next->time - prev->time), 0.0, 1.0);
  return prev->value + w * (next->value - prev->value);
}

std::string to_string(Interpolation interpolation) {
  return interpolation == Interpolation::kLinear ? "linear" : "constant";
}

Interpolation interpolation_from_string(const std::string& text) {
  if (text == "linear") return Interpolation::kLinear;
  if (text == "constant") return Interpolation::kConstant;
  throw ConfigError(fmt::format("unknown interpolation '{}' (expected linear or constant)", text));
}

}  // namespace psmc
