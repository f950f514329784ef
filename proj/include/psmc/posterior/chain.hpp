#pragma once

#include <cstdint>
#include <functional>

#include "psmc/posterior/likelihood.hpp"
#include "psmc/posterior/prior.hpp"
#include "psmc/posterior/proposal.hpp"
#include "psmc/posterior/rng.hpp"
#include "psmc/posterior/sample_store.hpp"

namespace psmc {

/// Unnormalised posterior: prior times likelihood, both in log space. The
/// evidence p(Y) is never needed.
class Posterior {
 public:
  Posterior(UniformBoxPrior prior, LogLikelihood likelihood);

  const UniformBoxPrior& prior() const { return prior_; }
  double log_prior(const ParameterVector& theta) const { return prior_.log_density(theta); }
  /// NaN is reported as -infinity.
  double log_likelihood(const ParameterVector& theta) const;

 private:
  UniformBoxPrior prior_;
  LogLikelihood likelihood_;
};

struct ChainState {
  ParameterVector theta;
  double log_likelihood;
  double log_prior;
  CounterRng rng;

  double log_posterior() const { return log_likelihood + log_prior; }
};

/// log of the Metropolis-Hastings ratio before capping at 1:
///     log p(to) - log p(from) + log q(to -> from) - log q(from -> to)
double log_acceptance_ratio(double log_posterior_from, double log_posterior_to, double log_q_ratio);

/// Draws theta from the prior until the likelihood is finite. Throws Error
/// after `max_attempts` failed draws.
ChainState initialize_chain(const Posterior& posterior, std::uint64_t seed,
                            std::size_t max_attempts = 1000);

/// One Metropolis-Hastings transition. Returns true when the proposal was
/// accepted; otherwise `state` is left unchanged apart from its generator.
bool mcmc_step(ChainState& state, const Proposal& proposal, const Posterior& posterior);

struct ChainStats {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double acceptance_rate() const {
    return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  }
};

/// Invoked once per recorded step with the 0-based post-burn-in index.
using StepCallback = std::function<void(std::uint64_t step, const ChainState& state, bool accepted)>;
/// Periodic progress report: steps done, steps requested, acceptance so far.
using ProgressCallback = std::function<void(std::uint64_t done, std::uint64_t total, double acceptance)>;

/// A Metropolis-Hastings chain that can be advanced incrementally.
class MetropolisChain {
 public:
  MetropolisChain(const Posterior& posterior, const Proposal& proposal, std::uint64_t seed);

  /// Advances without recording.
  void burn_in(std::uint64_t steps);
  bool step();

  /// Advances `steps` times, appending each state to `store`.
  void record(std::uint64_t steps, SampleStore& store, const StepCallback& on_step = {},
              const ProgressCallback& progress = {}, std::uint64_t progress_every = 0);

  const ChainState& state() const { return state_; }
  const ChainStats& stats() const { return stats_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t burned_in() const { return burned_in_; }

 private:
  const Posterior& posterior_;
  const Proposal& proposal_;
  std::uint64_t seed_;
  ChainState state_;
  ChainStats stats_;
  std::uint64_t burned_in_ = 0;
  std::uint64_t recorded_ = 0;
};

struct ChainSettings {
  std::uint64_t burn_in = 0;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  ProgressCallback progress;
  std::uint64_t progress_every = 0;
};

/// Initialises from the prior, discards `burn_in` steps, then records
/// `steps` states. Deterministic for a given seed.
SampleStore run_chain(const Posterior& posterior, const Proposal& proposal,
                      const ChainSettings& settings, const StepCallback& on_step = {},
                      ChainStats* stats = nullptr);

}  // namespace psmc
