#include "psmc/posterior/proposal.hpp"

#include <cmath>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc {

void ProposalSpec::validate(std::size_t dims) const {
  if (sigmas.size() != dims) {
    throw ValidationError(fmt::format("proposal has {} standard deviations for {} parameters",
                                      sigmas.size(), dims));
  }
  for (double s : sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ValidationError(fmt::format("proposal standard deviation {} must be positive", s));
    }
  }
}

GaussianProposal::GaussianProposal(ProposalSpec spec) : spec_(std::move(spec)) {
  spec_.validate(spec_.sigmas.size());
  if (spec_.sigmas.empty()) throw ValidationError("proposal needs at least one dimension");
}

ParameterVector GaussianProposal::propose(const ParameterVector& from, CounterRng& rng) const {
  if (from.size() != spec_.sigmas.size()) {
    throw ValidationError(fmt::format("proposal has {} dimensions, parameter vector {}",
                                      spec_.sigmas.size(), from.size()));
  }
  ParameterVector to = from;
  for (std::size_t i = 0; i < to.size(); ++i) to[i] += spec_.sigmas[i] * rng.normal();
  return to;
}

}  // namespace psmc
