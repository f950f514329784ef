#include "psmc/posterior/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Posterior::Posterior(UniformBoxPrior prior, LogLikelihood likelihood)
    : prior_(std::move(prior)), likelihood_(std::move(likelihood)) {
  if (!likelihood_) throw ValidationError("posterior needs a likelihood");
}

double Posterior::log_likelihood(const ParameterVector& theta) const {
  const double ll = likelihood_(theta);
  return std::isnan(ll) ? kNegInf : ll;
}

double log_acceptance_ratio(double log_posterior_from, double log_posterior_to, double log_q_ratio) {
  if (log_posterior_to == kNegInf) return kNegInf;
  return log_posterior_to - log_posterior_from + log_q_ratio;
}

ChainState initialize_chain(const Posterior& posterior, std::uint64_t seed, std::size_t max_attempts) {
  CounterRng rng(seed);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    ParameterVector theta = posterior.prior().sample(rng);
    const double lp = posterior.log_prior(theta);
    if (lp == kNegInf) continue;
    const double ll = posterior.log_likelihood(theta);
    if (std::isfinite(ll)) return ChainState{std::move(theta), ll, lp, rng};
  }
  throw Error(fmt::format("no prior draw with finite likelihood after {} attempts (seed {})",
                          max_attempts, seed));
}

bool mcmc_step(ChainState& state, const Proposal& proposal, const Posterior& posterior) {
  ParameterVector candidate = proposal.propose(state.theta, state.rng);
  const double eta = state.rng.uniform();

  const double lp = posterior.log_prior(candidate);
  if (lp == kNegInf) return false;
  const double ll = posterior.log_likelihood(candidate);
  const double log_alpha = log_acceptance_ratio(state.log_posterior(), ll + lp,
                                                proposal.log_ratio(state.theta, candidate));
  if (!(eta < std::exp(std::min(0.0, log_alpha)))) return false;

  state.theta = std::move(candidate);
  state.log_likelihood = ll;
  state.log_prior = lp;
  return true;
}

MetropolisChain::MetropolisChain(const Posterior& posterior, const Proposal& proposal,
                                 std::uint64_t seed)
    : posterior_(posterior),
      proposal_(proposal),
      seed_(seed),
      state_(initialize_chain(posterior, seed)) {}

bool MetropolisChain::step() {
  const bool accepted = mcmc_step(state_, proposal_, posterior_);
  ++stats_.proposed;
  stats_.accepted += accepted;
  return accepted;
}

void MetropolisChain::burn_in(std::uint64_t steps) {
  for (std::uint64_t i = 0; i < steps; ++i) step();
  burned_in_ += steps;
}

void MetropolisChain::record(std::uint64_t steps, SampleStore& store, const StepCallback& on_step,
                             const ProgressCallback& progress, std::uint64_t progress_every) {
  for (std::uint64_t i = 0; i < steps; ++i) {
    const bool accepted = step();
    store.append(state_.theta, state_.log_posterior());
    if (on_step) on_step(recorded_, state_, accepted);
    ++recorded_;
    if (progress && progress_every && (i + 1) % progress_every == 0) {
      progress(i + 1, steps, stats_.acceptance_rate());
    }
  }
}

SampleStore run_chain(const Posterior& posterior, const Proposal& proposal,
                      const ChainSettings& settings, const StepCallback& on_step, ChainStats* stats) {
  if (settings.steps == 0) throw ValidationError("chain must record at least one step");
  MetropolisChain chain(posterior, proposal, settings.seed);
  chain.burn_in(settings.burn_in);
  SampleStore store(posterior.prior().space().names(), settings.burn_in, settings.seed);
  chain.record(settings.steps, store, on_step, settings.progress, settings.progress_every);
  if (stats) *stats = chain.stats();
  return store;
}

}  // namespace psmc
