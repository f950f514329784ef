#pragma once

#include <vector>

#include "psmc/model/parameter_space.hpp"
#include "psmc/posterior/rng.hpp"

namespace psmc {

/// Standard deviations of an axis-aligned Gaussian random-walk proposal.
struct ProposalSpec {
  std::vector<double> sigmas;

  /// Throws ValidationError unless there are `dims` positive finite entries.
  void validate(std::size_t dims) const;
};

/// Proposal kernel q(from -> to).
class Proposal {
 public:
  virtual ~Proposal() = default;

  virtual ParameterVector propose(const ParameterVector& from, CounterRng& rng) const = 0;

  /// log q(to -> from) - log q(from -> to); zero for symmetric kernels.
  virtual double log_ratio(const ParameterVector& from, const ParameterVector& to) const = 0;
};

/// theta' ~ N(theta, diag(sigma^2)). Symmetric, so log_ratio is identically 0.
class GaussianProposal final : public Proposal {
 public:
  explicit GaussianProposal(ProposalSpec spec);

  ParameterVector propose(const ParameterVector& from, CounterRng& rng) const override;
  double log_ratio(const ParameterVector&, const ParameterVector&) const override { return 0.0; }

  const ProposalSpec& spec() const { return spec_; }

 private:
  ProposalSpec spec_;
};

}  // namespace psmc
