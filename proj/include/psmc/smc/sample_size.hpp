#pragma once

#include <cstdint>

namespace psmc {

/// Smallest N with exp(-gamma delta^2 N) <= epsilon, i.e.
/// ceil(log(1/epsilon) / (gamma delta^2)).
/// Requires epsilon, delta in (0,1) and gamma in (0,1]; throws ValidationError.
std::uint64_t fixed_sample_size(double epsilon, double delta, double gamma);

/// Boundary distance of the sequential test:
///     M = log(2 / (epsilon gamma delta^2)) / (2 gamma delta + gamma delta^2 / (1 - r))
double sequential_threshold(double epsilon, double delta, double gamma, double r);

/// exp(-gamma delta^2 n): error bound of the fixed test after n samples.
double fixed_error_bound(double delta, double gamma, double n);

}  // namespace psmc
