#pragma once

#include <cstdint>

#include "psmc/posterior/rng.hpp"

namespace psmc {

/// Reversible two-state Markov chain with P(stay) = 1 - a in state 0 and
/// 1 - b in state 1, where a = gamma p and b = gamma (1 - p). Its stationary
/// law puts mass p on state 1 and its spectral gap is a + b = gamma, so
/// "state == 1" is a property with known probability p under a chain of
/// known mixing speed. Starts from the stationary law.
class TwoStateChain {
 public:
  TwoStateChain(double p, double gamma, std::uint64_t seed, std::uint64_t stream = 0);

  /// Advances one step and returns whether the new state is 1.
  bool next();
  bool state() const { return state_; }

  double p() const { return p_; }
  double gamma() const { return gamma_; }

 private:
  double p_;
  double gamma_;
  CounterRng rng_;
  bool state_;
};

}  // namespace psmc
