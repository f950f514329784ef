#pragma once

#include <span>
#include <vector>

#include "psmc/model/input_signal.hpp"
#include "psmc/model/ode_system.hpp"

namespace psmc::jakstat {

/// Knobs the pathway equations leave open.
struct Options {
  /// Initial unphosphorylated cytoplasmic STAT; every other species starts at 0.
  double initial_stat = 3.0;
  /// Multiplicative scale of the total phosphorylated STAT observable.
  double phospho_scale = 1.0;
  /// Multiplicative scale of the total cytoplasmic STAT observable.
  double cytoplasmic_scale = 1.0;
};

/// Parameter box for (k1, k2, k3, k4).
ParameterSpace parameter_space();

/// Diagonal proposal standard deviations matching parameter_space().
std::vector<double> proposal_sigmas();

/// State names in layout order: STAT, STATp, STATpd, X1..XK, STATn.
std::vector<std::string> state_names(int delay_stages);

/// JAK-STAT signalling model with `delay_stages` nuclear delay compartments and
/// Epo as its single external input. Throws ValidationError for K < 1.
OdeSystem model(int delay_stages, InputSignal epo, const Options& options = {});

/// STAT + STATp + 2 STATpd + 2 sum(X_j); constant along every trajectory.
double conserved_total(std::span<const double> state, int delay_stages);

}  // namespace psmc::jakstat
