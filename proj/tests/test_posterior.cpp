#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "psmc/error.hpp"
#include "psmc/posterior/chain.hpp"
#include "psmc/posterior/observations.hpp"

using namespace psmc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x(t) = theta * t, observed directly, so y(1) = theta.
OdeSystem linear_model(double lo = -10, double hi = 10) {
  return OdeSystem({"x"}, {0.0}, {}, {}, [](auto, auto, auto th, double, std::span<double> d) { d[0] = th[0]; },
                   {{"y", {{0, 1.0}}, 1.0}}, ParameterSpace({"theta"}, {{lo, hi}}));
}

LogLikelihood standard_normal() {
  return [](const ParameterVector& th) { return -0.5 * th[0] * th[0]; };
}

}  // namespace

TEST_CASE("counter rng is reproducible and roughly uniform/normal") {
  CounterRng a(42, 1), b(42, 1), c(42, 2);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    differs |= x != c();
  }
  CHECK(differs);
  CounterRng r(7);
  double sum = 0, sum_sq = 0, nsum = 0, nsum_sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum_sq += u * u;
    const double z = r.normal();
    nsum += z;
    nsum_sq += z * z;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum_sq / n - std::pow(sum / n, 2) == doctest::Approx(1.0 / 12).epsilon(0.02));
  CHECK(std::abs(nsum / n) < 0.01);
  CHECK(nsum_sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform box prior") {
  UniformBoxPrior prior(ParameterSpace({"k1", "k2", "k3", "k4"}, {{0, 5}, {0, 30}, {0, 1}, {0, 5}}));
  CHECK(prior.log_density({1, 1, 0.5, 1}) == doctest::Approx(-6.620073).epsilon(1e-6));
  CHECK(prior.log_density({1, 1, 1.5, 1}) == -kInf);
  CHECK_THROWS(prior.log_density({1, 1}));
  UniformBoxPrior unit(ParameterSpace({"a", "b"}, {{0, 1}, {0, 1}}));
  CHECK(unit.log_density({0.3, 0.9}) == 0.0);
  CounterRng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(prior.space().contains(prior.sample(rng)));
}

TEST_CASE("gaussian log-likelihood") {
  ConditionSet systems{{"c", linear_model()}};
  TimeGrid grid({0, 1});
  auto data = [](double value, double sigma) { return ObservationSet({{"c", 0, 1.0, value, sigma}}); };
  CHECK(OdeLikelihood(systems, grid, data(2.0, 0.3))({2.0}) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(OdeLikelihood(systems, grid, data(2.0, 0.3))({2.3}) == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(OdeLikelihood(systems, grid, data(2.0, 0.3))({2.6}) == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(log_likelihood(systems, {2.6}, data(2.0, 0.3), grid) == doctest::Approx(-2.0).epsilon(1e-6));
  // data at a time off the grid, or for an unknown condition, is rejected up front
  CHECK_THROWS_AS(OdeLikelihood(systems, grid, ObservationSet({{"c", 0, 0.5, 1.0, 1.0}})), DataError);
  CHECK_THROWS_AS(OdeLikelihood(systems, grid, ObservationSet({{"d", 0, 1.0, 1.0, 1.0}})), DataError);
}

TEST_CASE("integration failure gives zero likelihood") {
  OdeSystem blowup({"x"}, {1.0}, {}, {},
                   [](auto x, auto, auto th, double, std::span<double> d) { d[0] = th[0] * x[0] * x[0]; },
                   {{"y", {{0, 1.0}}, 1.0}}, ParameterSpace({"k"}, {{0, 10}}));
  OdeLikelihood lik({{"c", blowup}}, TimeGrid({0, 1, 2}), ObservationSet({{"c", 0, 2.0, 1.0, 1.0}}));
  CHECK(lik({5.0}) == -kInf);
  CHECK(std::isfinite(lik({0.1})));
}

TEST_CASE("observation csv") {
  const std::vector<std::string> obs{"pSTAT", "cSTAT"};
  auto set = parse_observations_csv(
      "condition,observable,time_min,value,sigma\n"
      "transient,pSTAT,0,0.1,0.05\n"
      "transient,2,10,1.5,0.1\n",
      obs);
  REQUIRE(set.size() == 2);
  CHECK(set.records()[0].observable == 0);
  CHECK(set.records()[1].observable == 1);
  CHECK(set.records()[1].time == 10.0);
  CHECK_THROWS_AS(parse_observations_csv("a,b\n", obs), DataError);
  CHECK_THROWS_AS(parse_observations_csv("condition,observable,time_min,value,sigma\nc,pSTAT,0,1,-1\n", obs),
                  DataError);
  CHECK_THROWS_AS(parse_observations_csv("condition,observable,time_min,value,sigma\nc,zzz,0,1,1\n", obs),
                  DataError);
  CHECK_THROWS_AS(load_observations_csv("/nonexistent/data.csv", obs), DataError);
}

TEST_CASE("acceptance ratio is antisymmetric") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0, 50);
  for (int i = 0; i < 1000; ++i) {
    const double a = z(rng), b = z(rng), q = z(rng) / 10;
    CHECK(log_acceptance_ratio(a, b, q) == doctest::Approx(-log_acceptance_ratio(b, a, -q)));
  }
}

TEST_CASE("mcmc step: outside proposals are rejected, uphill moves accepted") {
  Posterior post(UniformBoxPrior(ParameterSpace({"t"}, {{0, 1}})), [](const ParameterVector& th) { return th[0]; });
  GaussianProposal wide({{100.0}});
  GaussianProposal tiny({{1e-6}});
  auto state = initialize_chain(post, 1);
  for (int i = 0; i < 200; ++i) {
    const auto before = state.theta;
    const auto lp = state.log_posterior();
    const bool accepted = mcmc_step(state, wide, post);
    if (!accepted) {
      CHECK(state.theta == before);
      CHECK(state.log_posterior() == lp);
    } else {
      CHECK(post.prior().space().contains(state.theta));
    }
  }
  // with log p(theta) = theta, an upward move has alpha = 1
  int uphill = 0;
  for (int i = 0; i < 2000; ++i) {
    const double before = state.theta[0];
    const bool accepted = mcmc_step(state, tiny, post);
    if (state.theta[0] >= before && state.theta[0] != before) ++uphill;
    if (!accepted) CHECK(state.theta[0] == before);
  }
  CHECK(uphill > 0);
}

TEST_CASE("initialization fails loudly when the posterior has no support") {
  Posterior post(UniformBoxPrior(ParameterSpace({"t"}, {{0, 1}})), [](const ParameterVector&) { return -kInf; });
  CHECK_THROWS_AS(initialize_chain(post, 1, 10), Error);
}

TEST_CASE("tiny proposals collapse into one record") {
  Posterior post(UniformBoxPrior(ParameterSpace({"t"}, {{1, 2}})), standard_normal());
  GaussianProposal prop({{1e-300}});
  auto store = run_chain(post, prop, {0, 5, 9});
  REQUIRE(store.records().size() == 1);
  CHECK(store.records()[0].multiplicity == 5);
  CHECK(store.total_steps() == 5);
}

TEST_CASE("store expansion reproduces the recorded steps and is seed-deterministic") {
  Posterior post(UniformBoxPrior(ParameterSpace({"a", "b"}, {{-5, 5}, {-5, 5}})),
                 [](const ParameterVector& th) { return -0.5 * (th[0] * th[0] + 4 * th[1] * th[1]); });
  GaussianProposal prop({{1.5, 1.5}});
  std::vector<double> seen;
  auto store = run_chain(post, prop, {100, 3000, 77}, [&](std::uint64_t, const ChainState& s, bool) {
    seen.insert(seen.end(), s.theta.values().begin(), s.theta.values().end());
  });
  CHECK(store.expanded() == seen);
  CHECK(store.total_steps() == 3000);
  CHECK(store.burn_in() == 100);
  CHECK(store.records().size() < 3000);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < store.records().size(); ++i) {
    total += store.records()[i].multiplicity;
    if (i) CHECK_FALSE(store.records()[i].theta == store.records()[i - 1].theta);
  }
  CHECK(total == 3000);
  CHECK(run_chain(post, prop, {100, 3000, 77}) == store);
  CHECK_FALSE(run_chain(post, prop, {100, 3000, 78}) == store);

  std::stringstream text;
  store.write(text);
  CHECK(SampleStore::read(text) == store);
  std::stringstream again;
  run_chain(post, prop, {100, 3000, 77}).write(again);
  std::stringstream first;
  store.write(first);
  CHECK(first.str() == again.str());
}

TEST_CASE("malformed stores are rejected") {
  std::stringstream bad("# psmc sample store v1\n# parameters: a\n# burn_in: 0\n# seed: 1\n"
                        "step_index_start,a,multiplicity,log_posterior\n0,1.0,x,2\n");
  CHECK_THROWS(SampleStore::read(bad));
  std::stringstream gap("# psmc sample store v1\n# parameters: a\n# burn_in: 0\n# seed: 1\n"
                        "step_index_start,a,multiplicity,log_posterior\n0,1.0,2,0\n5,2.0,1,0\n");
  CHECK_THROWS(SampleStore::read(gap));
}

TEST_CASE("toy posterior moments") {
  Posterior post(UniformBoxPrior(ParameterSpace({"t"}, {{-10, 10}})), standard_normal());
  GaussianProposal prop({{2.4}});
  ChainStats stats;
  auto store = run_chain(post, prop, {1000, 1000000, 5}, {}, &stats);
  double mean = 0, sq = 0;
  for (const auto& r : store.records()) {
    mean += r.theta[0] * static_cast<double>(r.multiplicity);
    sq += r.theta[0] * r.theta[0] * static_cast<double>(r.multiplicity);
  }
  mean /= 1e6;
  sq /= 1e6;
  CHECK(std::abs(mean) < 0.05);
  CHECK(sq - mean * mean == doctest::Approx(1.0).epsilon(0.1));
  CHECK(stats.acceptance_rate() > 0.2);
  CHECK(stats.acceptance_rate() < 0.6);
}

TEST_CASE("the ODE-backed likelihood drives the same chain") {
  ConditionSet systems{{"c", linear_model()}};
  OdeLikelihood lik(systems, TimeGrid({0, 1}), ObservationSet({{"c", 0, 1.0, 0.0, 1.0}}));
  Posterior post(UniformBoxPrior(ParameterSpace({"t"}, {{-10, 10}})), lik);
  GaussianProposal prop({{2.4}});
  auto store = run_chain(post, prop, {500, 20000, 3});
  double mean = 0;
  for (const auto& r : store.records()) mean += r.theta[0] * static_cast<double>(r.multiplicity);
  CHECK(std::abs(mean / 20000) < 0.15);
}
