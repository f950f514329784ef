#pragma once

#include <cstddef>
#include <vector>

#include "psmc/bltl/formula.hpp"
#include "psmc/model/ode_system.hpp"

namespace psmc::bltl {

/// Truth value of `formula` at every grid index of `trajectory`.
///
/// Until(T, a, b) holds at i when some j >= i with time[j] - time[i] <= T
/// satisfies b and a holds on [i, j). Witnesses are confined to the grid, so
/// bounds reaching past the horizon are truncated there.
///
/// Works bottom-up over (subformula, index): O(|formula| * n^2) worst case.
std::vector<char> evaluate_all(const Formula& formula, const Trajectory& trajectory);

/// Throws std::out_of_range if index is not a grid index.
bool evaluate(const Formula& formula, const Trajectory& trajectory, std::size_t index);

/// Indicator of trajectory |= formula, i.e. evaluation at index 0.
bool satisfies(const Formula& formula, const Trajectory& trajectory);

}  // namespace psmc::bltl
