#include "psmc/smc/sample_size.hpp"

#include <cmath>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc {
namespace {

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw ValidationError(fmt::format("{} must lie in (0, 1), got {}", name, v));
}

void require_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ValidationError(fmt::format("gamma must lie in (0, 1], got {}", gamma));
  }
}

}  // namespace

std::uint64_t fixed_sample_size(double epsilon, double delta, double gamma) {
  require_open_unit(epsilon, "epsilon");
  require_open_unit(delta, "delta");
  require_gamma(gamma);
  const double rate = gamma * delta * delta;
  const double n = std::ceil(std::log(1.0 / epsilon) / rate);
  if (!(n < 9.0e18)) throw ValidationError("required sample size overflows");
  return n < 1.0 ? 1 : static_cast<std::uint64_t>(n);
}

double sequential_threshold(double epsilon, double delta, double gamma, double r) {
  require_open_unit(epsilon, "epsilon");
  require_open_unit(delta, "delta");
  require_open_unit(r, "r");
  require_gamma(gamma);
  const double gd2 = gamma * delta * delta;
  const double M = std::log(2.0 / (epsilon * gd2)) / (2.0 * gamma * delta + gd2 / (1.0 - r));
  if (!(M > 0.0) || !std::isfinite(M)) {
    throw ValidationError(fmt::format("threshold is not positive for epsilon={} delta={} gamma={}", epsilon,
                                      delta, gamma));
  }
  return M;
}

double fixed_error_bound(double delta, double gamma, double n) { return std::exp(-gamma * delta * delta * n); }

}  // namespace psmc
