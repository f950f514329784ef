#include "psmc/diagnostics/spectral_gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc {

LagStatistics lag_statistics(std::span<const double> series, std::size_t eta) {
  const std::size_t n = series.size();
  if (eta < 1 || n <= eta) {
    throw ValidationError(fmt::format("lag {} needs a series longer than the lag (n={})", eta, n));
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : series) {
    sum += x;
    sum_sq += x * x;
  }
  const double nd = static_cast<double>(n);
  const double mean = sum / nd;
  // two-pass form of (1/n) sum x^2 - mean^2, which cancels badly otherwise
  double variance = 0.0;
  for (double x : series) variance += (x - mean) * (x - mean);
  variance /= nd;
  if (!(variance > 0.0) || variance <= 1e-14 * std::max(1.0, sum_sq / nd)) {
    throw ValidationError("degenerate variance: the series is constant");
  }

  const std::size_t m = n - eta;
  double head_mean = 0.0;
  double tail_mean = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    head_mean += series[i];
    tail_mean += series[i + eta];
  }
  head_mean /= static_cast<double>(m);
  tail_mean /= static_cast<double>(m);
  double cov = 0.0;
  for (std::size_t i = 0; i < m; ++i) cov += (series[i] - head_mean) * (series[i + eta] - tail_mean);
  cov /= static_cast<double>(m);
  return {variance, cov};
}

namespace {

struct Column {
  std::vector<double> values;
};

std::vector<Column> columns_of(std::span<const double> history, std::size_t dims) {
  const std::size_t n = history.size() / dims;
  std::vector<Column> cols(dims);
  for (std::size_t k = 0; k < dims; ++k) {
    cols[k].values.resize(n);
    for (std::size_t i = 0; i < n; ++i) cols[k].values[i] = history[i * dims + k];
  }
  return cols;
}

// min_k gamma_{eta,k}; coordinates with non-positive correlation count as 1.
double min_gamma(const std::vector<Column>& cols, const std::vector<bool>& usable, std::size_t eta) {
  double best = 1.0;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (!usable[k]) continue;
    const double ratio = lag_statistics(cols[k].values, eta).ratio();
    if (!(ratio > 0.0)) continue;
    const double gamma = 1.0 - std::pow(std::min(ratio, 1.0), 1.0 / static_cast<double>(eta));
    best = std::min(best, gamma);
  }
  // an exactly unit-root estimate still has to stay inside (0, 1]
  return std::max(best, std::numeric_limits<double>::min());
}

std::size_t next_lag(std::size_t n, double gamma) {
  if (gamma >= 1.0) return 1;
  const double eta = std::log(static_cast<double>(n) * gamma) / (4.0 * std::log(1.0 / (1.0 - gamma)));
  if (!std::isfinite(eta) || eta < 1.0) return 1;
  const double capped = std::min(std::round(eta), static_cast<double>(n / 2));
  return std::max<std::size_t>(1, static_cast<std::size_t>(capped));
}

}  // namespace

GapResult estimate_gap(std::span<const double> history, std::size_t dims, const GapOptions& options) {
  if (dims == 0 || history.size() % dims != 0) {
    throw ValidationError("history size is not a multiple of the dimension");
  }
  const std::size_t n = history.size() / dims;
  if (n < options.min_samples) {
    throw ValidationError(fmt::format("spectral gap estimation needs at least {} samples, got {}",
                                      options.min_samples, n));
  }
  const auto cols = columns_of(history, dims);
  std::vector<bool> usable(dims);
  bool any = false;
  for (std::size_t k = 0; k < dims; ++k) {
    try {
      (void)lag_statistics(cols[k].values, 1);
      usable[k] = true;
      any = true;
    } catch (const ValidationError&) {
      usable[k] = false;
    }
  }
  if (!any) throw ValidationError("degenerate variance: every coordinate is constant");

  std::size_t eta = 1;
  double gamma = min_gamma(cols, usable, eta);
  std::size_t iterations = 1;
  while (iterations < options.max_iterations) {
    const std::size_t candidate_eta = next_lag(n, gamma);
    const double candidate = min_gamma(cols, usable, candidate_eta);
    ++iterations;
    if (candidate >= gamma) break;
    gamma = candidate;
    eta = candidate_eta;
  }

  GapEstimate estimate{gamma, eta, iterations, n, false};
  if (static_cast<double>(n) > 100.0 / gamma) return estimate;
  const double required = std::ceil(200.0 / gamma);
  const auto required_n = required >= static_cast<double>(std::numeric_limits<std::size_t>::max() / 2)
                              ? std::numeric_limits<std::size_t>::max() / 2
                              : static_cast<std::size_t>(required);
  return InsufficientData{required_n, estimate};
}

GapEstimate estimate_gap_until_sufficient(std::span<const double> history, std::size_t dims,
                                          const std::function<std::vector<double>(std::size_t)>& more,
                                          const GapOptions& options, std::size_t max_restarts) {
  GapResult result = estimate_gap(history, dims, options);
  std::vector<double> extended;
  for (std::size_t restart = 0; restart <= max_restarts; ++restart) {
    if (auto* done = std::get_if<GapEstimate>(&result)) {
      done->restarted = restart > 0;
      return *done;
    }
    if (restart == max_restarts) break;
    const auto& need = std::get<InsufficientData>(result);
    extended = more(need.required_n);
    if (extended.size() / dims < need.required_n) {
      throw Error(fmt::format("gap estimation asked for {} samples but received {}", need.required_n,
                              extended.size() / dims));
    }
    result = estimate_gap(extended, dims, options);
  }
  const auto& need = std::get<InsufficientData>(result);
  throw Error(fmt::format("spectral gap estimate {:.3g} still needs {} samples after {} restarts",
                          need.provisional.gamma_hat, need.required_n, max_restarts));
}

}  // namespace psmc
