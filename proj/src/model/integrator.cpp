#include "psmc/model/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc {

void StepControl::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw ValidationError("integrator tolerances must be positive");
  }
  if (!(min_step > 0.0)) throw ValidationError("minimum step must be positive");
  if (max_steps == 0) throw ValidationError("step budget must be positive");
}

const Trajectory& IntegrationResult::trajectory() const {
  if (!ok()) {
    const auto& f = failure();
    throw Error(fmt::format("integration failed at t={}: {}", f.time, f.reason));
  }
  return std::get<Trajectory>(value_);
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

class Stepper {
 public:
  Stepper(const OdeSystem& system, const ParameterVector& theta, const StepControl& control)
      : system_(system),
        theta_(theta.values()),
        control_(control),
        n_(system.state_dim()),
        k1_(n_), k2_(n_), k3_(n_), k4_(n_), k5_(n_), k6_(n_), k7_(n_),
        tmp_(n_), next_(n_) {}

  // Advances y from t to `stop`, where [t, stop] lies inside one piece of
  // every input. `new_piece` means t is an input breakpoint, so the cached
  // derivative (taken from the left) is stale. Returns false and fills
  // failure_ on error.
  bool advance_to(double& t, std::vector<double>& y, double stop, bool new_piece) {
    anchor_ = t;
    if (!started_ || new_piece) {
      derive(y, t, k1_);
      if (!all_finite(k1_)) return fail(t, "non-finite derivative");
    }
    if (!started_) {
      h_ = initial_step(t, y, stop - t);
      started_ = true;
    }
    while (t < stop) {
      if (++steps_ > control_.max_steps) return fail(t, "step budget exhausted");
      const double remaining = stop - t;
      bool lands = h_ >= remaining;
      double h = lands ? remaining : h_;
      // avoid leaving a sliver shorter than the rounding noise of t
      if (!lands && remaining - h < 1e-10 * std::max(1.0, std::abs(stop))) {
        h = remaining;
        lands = true;
      }
      if (h < control_.min_step * std::max(1.0, std::abs(t))) {
        return fail(t, fmt::format("step size underflow (h={:.3g})", h));
      }

      const double err = attempt(t, y, h);
      if (!std::isfinite(err)) {
        if (++nonfinite_ > 30) return fail(t, "non-finite state");
        h_ = h * 0.1;
        rejected_ = true;
        continue;
      }
      nonfinite_ = 0;
      if (err <= 1.0) {
        t = lands ? stop : t + h;
        y.swap(next_);
        k1_.swap(k7_);  // first-same-as-last
        double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
        factor = std::clamp(factor, 0.2, rejected_ ? 1.0 : 5.0);
        // a step clipped to a stop point says little about the natural size
        if (!(lands && h < h_)) h_ = h * factor;
        rejected_ = false;
      } else {
        h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
        rejected_ = true;
      }
    }
    return true;
  }

  const IntegrationFailure& failure() const { return failure_; }

 private:
  bool fail(double t, std::string reason) {
    failure_ = {t, std::move(reason)};
    return false;
  }

  void derive(const std::vector<double>& y, double t, std::vector<double>& out) const {
    system_.derivative(y, theta_, t, anchor_, out);
  }

  static bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  }

  double scaled_norm(const std::vector<double>& v, const std::vector<double>& y) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double sc = control_.abs_tol + control_.rel_tol * std::abs(y[i]);
      sum += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(sum / static_cast<double>(n_));
  }

  // Hairer & Wanner's starting step heuristic.
  double initial_step(double t, const std::vector<double>& y, double span) {
    const double d0 = scaled_norm(y, y);
    const double d1 = scaled_norm(k1_, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h0 * k1_[i];
    derive(tmp_, t + h0, k2_);
    for (std::size_t i = 0; i < n_; ++i) k2_[i] -= k1_[i];
    const double d2 = scaled_norm(k2_, y) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    double h = std::min(100.0 * h0, h1);
    if (!std::isfinite(h) || h <= 0.0) h = 1e-6;
    return h;
  }

  // One trial step of size h; fills next_ and k7_ and returns the error norm.
  double attempt(double t, const std::vector<double>& y, double h) {
    const std::size_t n = n_;
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * a21 * k1_[i];
    derive(tmp_, t + c2 * h, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    derive(tmp_, t + c3 * h, k3_);
    for (std::size_t i = 0; i < n; ++i) {
      tmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    }
    derive(tmp_, t + c4 * h, k4_);
    for (std::size_t i = 0; i < n; ++i) {
      tmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    }
    derive(tmp_, t + c5 * h, k5_);
    for (std::size_t i = 0; i < n; ++i) {
      tmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                            a65 * k5_[i]);
    }
    derive(tmp_, t + h, k6_);
    for (std::size_t i = 0; i < n; ++i) {
      next_[i] = y[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] +
                             a76 * k6_[i]);
    }
    derive(next_, t + h, k7_);

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                            e6 * k6_[i] + e7 * k7_[i]);
      const double sc =
          control_.abs_tol + control_.rel_tol * std::max(std::abs(y[i]), std::abs(next_[i]));
      sum += (e / sc) * (e / sc);
      if (!std::isfinite(next_[i]) || !std::isfinite(k7_[i])) {
        return std::numeric_limits<double>::infinity();
      }
    }
    return std::sqrt(sum / static_cast<double>(n));
  }

  const OdeSystem& system_;
  std::span<const double> theta_;
  const StepControl& control_;
  std::size_t n_;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, next_;
  double h_ = 0.0;
  double anchor_ = 0.0;
  bool started_ = false;
  bool rejected_ = false;
  std::size_t steps_ = 0;
  int nonfinite_ = 0;
  IntegrationFailure failure_{0.0, {}};
};

}  // namespace

IntegrationResult integrate(const OdeSystem& system, const ParameterVector& theta,
                            const TimeGrid& grid, const StepControl& control) {
  control.validate();
  system.parameter_space().validate(theta);

  const std::size_t n = system.state_dim();
  std::vector<double> out;
  out.reserve(grid.size() * n);
  std::vector<double> y = system.initial_state();
  out.insert(out.end(), y.begin(), y.end());

  // interior input breakpoints become extra stop points
  const auto breakpoints = system.input_breakpoints();
  std::vector<double> stops;
  for (double b : breakpoints) {
    if (b > 0.0 && b < grid.horizon()) stops.push_back(b);
  }
  stops.insert(stops.end(), grid.times().begin() + 1, grid.times().end());
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  Stepper stepper(system, theta, control);
  double t = 0.0;
  std::size_t next_grid = 1;
  for (double stop : stops) {
    const bool new_piece = std::binary_search(breakpoints.begin(), breakpoints.end(), t);
    if (!stepper.advance_to(t, y, stop, new_piece)) return stepper.failure();
    if (next_grid < grid.size() && stop == grid[next_grid]) {
      out.insert(out.end(), y.begin(), y.end());
      ++next_grid;
    }
  }
  return Trajectory(grid, n, std::move(out));
}

}  // namespace psmc
