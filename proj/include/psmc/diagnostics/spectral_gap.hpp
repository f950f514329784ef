#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace psmc {

struct LagStatistics {
  double variance;
  double autocovariance;
  double ratio() const { return autocovariance / variance; }
};

/// Empirical variance (1/n) sum x^2 - mean^2 and lag-`eta` autocovariance
/// over the n - eta overlapping pairs, each window centred on its own mean.
/// Requires n > eta >= 1; throws ValidationError on a constant series.
LagStatistics lag_statistics(std::span<const double> series, std::size_t eta);

struct GapEstimate {
  double gamma_hat;
  std::size_t eta;
  std::size_t iterations;
  std::size_t n_used;
  bool restarted = false;
};

/// The estimate is not trustworthy yet: at least `required_n` samples are
/// needed (n must exceed 100 / gamma_hat).
struct InsufficientData {
  std::size_t required_n;
  GapEstimate provisional;
};

using GapResult = std::variant<GapEstimate, InsufficientData>;

struct GapOptions {
  std::size_t max_iterations = 50;
  std::size_t min_samples = 1000;
};

/// Iterative spectral-gap estimate from a parameter history stored row-major
/// (n x dims), multiplicity-expanded.
///
/// Per coordinate, gamma_k = 1 - (rho_eta / V)^(1/eta); the minimum over
/// coordinates at eta = 1 seeds the lag
///     eta = log(n gamma) / (4 log(1 / (1 - gamma)))
/// which is refined until gamma stops decreasing. Coordinates whose
/// autocorrelation is <= 0 mix faster than geometrically and count as 1.
/// Throws ValidationError if n < min_samples or every coordinate is constant.
GapResult estimate_gap(std::span<const double> history, std::size_t dims, const GapOptions& options = {});

/// Repeats estimate_gap on longer histories until the data requirement is
/// met. `more(n)` must return a history of at least n rows.
GapEstimate estimate_gap_until_sufficient(std::span<const double> history, std::size_t dims,
                                          const std::function<std::vector<double>(std::size_t)>& more,
                                          const GapOptions& options = {}, std::size_t max_restarts = 5);

}  // namespace psmc
