#include "psmc/smc/synthetic.hpp"

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc {

TwoStateChain::TwoStateChain(double p, double gamma, std::uint64_t seed, std::uint64_t stream)
    : p_(p), gamma_(gamma), rng_(seed, stream), state_(false) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError(fmt::format("p must lie in (0, 1), got {}", p));
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError(fmt::format("gamma must lie in (0, 1], got {}", gamma));
  state_ = rng_.uniform() < p_;
}

bool TwoStateChain::next() {
  const double leave = state_ ? gamma_ * (1.0 - p_) : gamma_ * p_;
  if (rng_.uniform() < leave) state_ = !state_;
  return state_;
}

}  // namespace psmc
