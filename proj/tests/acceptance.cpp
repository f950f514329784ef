// Acceptance checks. Prints one PASS/FAIL line per criterion; the exit code
// is non-zero when any selected criterion fails.
//
//   psmc_acceptance            run all
//   psmc_acceptance 3 4        run a subset

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "psmc/app/commands.hpp"
#include "psmc/app/study.hpp"
#include "psmc/bltl/evaluator.hpp"
#include "psmc/bltl/parser.hpp"
#include "psmc/diagnostics/spectral_gap.hpp"
#include "psmc/model/integrator.hpp"
#include "psmc/model/model_config.hpp"
#include "psmc/posterior/chain.hpp"
#include "psmc/smc/sample_size.hpp"
#include "psmc/smc/sources.hpp"
#include "psmc/smc/verifier.hpp"
#include "support/oracle.hpp"

using namespace psmc;

namespace {

// Pinned tolerances.
constexpr int kBltlCases = 10000;
constexpr int kSampleSizeCases = 1000;
constexpr double kSignificant = 1e-10;  // 10 significant digits
constexpr std::uint64_t kReplicas = 500;
constexpr double kFarStoppingFraction = 0.2;
constexpr int kAllowedInversions = 1;
constexpr std::uint64_t kMcmcSteps = 1000000;
constexpr double kMcmcStandardErrors = 3.0;
constexpr double kTwoStateRelTol = 0.01;
constexpr int kGapReplicates = 100;
constexpr int kGapMinInRange = 90;
constexpr double kIidMinGap = 0.5;
constexpr int kConservationDraws = 100;
constexpr double kConservationRelTol = 1e-6;
constexpr int kCaseStudySeeds = 5;
constexpr double kPsi1Low = 0.6, kPsi1High = 0.95;
constexpr int kDecouplingConfigs = 20;

struct Result {
  bool pass;
  std::string detail;
};

Trajectory trace_of(const oracle::Trace& tr) {
  std::vector<double> flat;
  for (const auto& row : tr.states) flat.insert(flat.end(), row.begin(), row.end());
  return Trajectory(TimeGrid(tr.times), tr.states.front().size(), flat);
}

Result bltl_oracle() {
  std::mt19937_64 rng(20140101);
  std::uniform_int_distribution<std::size_t> length(2, 16);  // a time grid has at least two points
  std::uniform_int_distribution<int> depth(0, 4);
  int disagreements = 0;
  std::size_t positions = 0;
  for (int c = 0; c < kBltlCases; ++c) {
    const auto f = oracle::random_formula(rng, depth(rng), 3);
    const auto tr = oracle::random_trace(rng, length(rng), 3);
    const auto all = bltl::evaluate_all(f, trace_of(tr));
    bool agree = true;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      agree = agree && static_cast<bool>(all[i]) == oracle::holds(f, tr, i);
      ++positions;
    }
    if (!agree) ++disagreements;
  }
  return {disagreements == 0,
          fmt::format("{} of {} cases disagree ({} trace positions compared)", disagreements, kBltlCases, positions)};
}

Result sample_size_formulas() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  double worst = 0.0;
  for (int c = 0; c < kSampleSizeCases; ++c) {
    const double eps = std::exp(std::log(1e-6) + u(rng) * (std::log(0.5) - std::log(1e-6)));
    const double gamma = std::exp(std::log(1e-4) + u(rng) * (0 - std::log(1e-4)));
    const double r = 0.01 + 0.98 * u(rng);
    const double delta = std::min(r, 1 - r) * (0.001 + 0.998 * u(rng));

    const double n_big = static_cast<double>(oracle::fixed_sample_size(eps, delta, gamma));
    const double n_lib = static_cast<double>(fixed_sample_size(eps, delta, gamma));
    // Exact quotient for deciding whether a disagreement is a rounding tie.
    const oracle::Big q = log(oracle::Big(1) / oracle::Big(eps)) /
                          (oracle::Big(gamma) * oracle::Big(delta) * oracle::Big(delta));
    const double frac = static_cast<double>(q - floor(q));
    const bool tie = std::min(frac, 1 - frac) <= kSignificant * n_big;
    const double n_err = std::abs(n_lib - n_big) / n_big;
    const bool n_ok = n_err <= kSignificant || (tie && std::abs(n_lib - n_big) <= 1);

    const double m_big = static_cast<double>(oracle::sequential_threshold(eps, delta, gamma, r));
    const double m_err = std::abs(sequential_threshold(eps, delta, gamma, r) - m_big) / m_big;
    worst = std::max({worst, m_err, tie ? 0.0 : n_err});
    if (!n_ok || m_err > kSignificant) ++bad;
  }
  return {bad == 0, fmt::format("{} of {} inputs off; worst relative error {:.2e}", bad, kSampleSizeCases, worst)};
}

Result fixed_error_rates() {
  app::FixedStudyConfig c;
  c.p = 0.8;
  c.gamma = 0.1;
  c.deltas = {0.03, 0.05, 0.1};
  c.ns = {1000, 10000, 100000};
  c.replicas = kReplicas;
  c.seed = 2014;
  const auto rows = app::run_fixed_study(c);
  std::map<std::pair<double, std::uint64_t>, int> errors;
  for (const auto& r : rows) errors[{r.delta, r.n}] += r.error ? 1 : 0;
  bool ok = true;
  std::string detail;
  for (const auto& [key, count] : errors) {
    const double rate = static_cast<double>(count) / static_cast<double>(kReplicas);
    const double bound = fixed_error_bound(key.first, c.gamma, static_cast<double>(key.second));
    ok = ok && rate <= bound;
    detail += fmt::format(" d={} n={}: {:.3f}<={:.3f}", key.first, key.second, rate, bound);
  }
  return {ok && errors.size() == 9, "error rate vs bound:" + detail};
}

Result sequential_soundness() {
  app::SequentialStudyConfig c;
  c.p = 0.8;
  c.gamma = 0.1;
  c.epsilons = {0.01};
  c.replicas = kReplicas;
  c.seed = 2015;
  int errors = 0, undecided = 0, runs = 0;
  // r = p - delta as in the fixed study, plus the mirrored r = p + delta where
  // that is a valid hypothesis (delta < 1 - r).
  for (double delta : {0.03, 0.05, 0.1}) {
    c.deltas = {delta};
    c.rs = {c.p - delta};
    if (delta < 1 - (c.p + delta)) c.rs.push_back(c.p + delta);
    for (const auto& row : app::run_sequential_study(c)) {
      ++runs;
      errors += row.error ? 1 : 0;
      undecided += row.decision == Decision::kUndecided ? 1 : 0;
    }
  }
  return {errors == 0 && undecided == 0,
          fmt::format("{} errors, {} undecided in {} runs (delta 0.03/0.05/0.1 at r = p - delta; 0.03/0.05 also at r = p + delta)", errors, undecided,
                      runs)};
}

Result stopping_time_shape() {
  app::SequentialStudyConfig c;
  c.p = 0.8;
  c.gamma = 0.1;
  c.rs = {0.3, 0.4, 0.5, 0.6, 0.7};
  c.deltas = {0.05};
  c.epsilons = {0.01};
  c.replicas = kReplicas;
  c.seed = 2016;
  const auto rows = app::run_sequential_study(c);
  std::map<double, std::pair<double, int>> sums;
  std::uint64_t fixed_n = 0;
  for (const auto& r : rows) {
    if (r.decision == Decision::kUndecided) return {false, "a run hit the sample cap"};
    sums[r.r].first += static_cast<double>(r.stopping_time);
    sums[r.r].second += 1;
    fixed_n = r.fixed_N;
  }
  std::vector<double> means;
  std::string detail;
  for (const auto& [r, s] : sums) {
    means.push_back(s.first / s.second);
    detail += fmt::format(" r={}:{:.0f}", r, means.back());
  }
  int inversions = 0;
  for (std::size_t i = 1; i < means.size(); ++i) inversions += means[i] < means[i - 1] ? 1 : 0;
  const double far = means.front() / static_cast<double>(fixed_n);
  return {far < kFarStoppingFraction && inversions <= kAllowedInversions,
          fmt::format("fixed N={}; far r at {:.1f}% of N; {} inversions; means:{}", fixed_n, 100 * far, inversions,
                      detail)};
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Result mcmc_correctness() {
  // y = x(1) with x' = theta, one observation y = 2 with sigma = 1 and a
  // uniform prior on [-1, 3]: the posterior is N(2, 1) truncated to [-1, 3].
  const double lo = -1, hi = 3, y = 2, sigma = 1;
  OdeSystem line({"x"}, {0.0}, {}, {},
                 [](auto, auto, std::span<const double> th, double, std::span<double> d) { d[0] = th[0]; },
                 {{"y", {{0, 1.0}}, 1.0}}, ParameterSpace({"theta"}, {{lo, hi}}));
  OdeLikelihood lik({{"c", line}}, TimeGrid({0, 1}), ObservationSet({{"c", 0, 1.0, y, sigma}}));
  Posterior post(UniformBoxPrior(line.parameter_space()), lik);
  GaussianProposal prop({{2.0}});
  const auto store = run_chain(post, prop, {5000, kMcmcSteps, 11});
  const auto xs = store.expanded();
  const double a = (lo - y) / sigma, b = (hi - y) / sigma;
  const double truth = y + sigma * (normal_pdf(a) - normal_pdf(b)) / (normal_cdf(b) - normal_cdf(a));
  // Batch means for the Monte-Carlo standard error.
  const std::size_t batches = 1000, size = xs.size() / batches;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (std::size_t k = 0; k < batches; ++k) {
    double m = 0.0;
    for (std::size_t i = k * size; i < (k + 1) * size; ++i) m += xs[i];
    m /= static_cast<double>(size);
    ss += (m - mean) * (m - mean);
  }
  const double se = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  const bool toy_ok = std::abs(mean - truth) <= kMcmcStandardErrors * se;

  // Two-state target: likelihood 3 on [0.5, 1], 1 on [0, 0.5).
  Posterior halves(UniformBoxPrior(ParameterSpace({"u"}, {{0, 1}})),
                   [](const ParameterVector& th) { return th[0] >= 0.5 ? std::log(3.0) : 0.0; });
  GaussianProposal prop2({{0.3}});
  const auto store2 = run_chain(halves, prop2, {1000, kMcmcSteps, 12});
  double upper = 0.0;
  for (const auto& r : store2.records()) upper += r.theta[0] >= 0.5 ? static_cast<double>(r.multiplicity) : 0.0;
  upper /= static_cast<double>(kMcmcSteps);
  const bool halves_ok = std::abs(upper / 0.75 - 1) <= kTwoStateRelTol;
  return {toy_ok && halves_ok,
          fmt::format("toy mean {:.5f} vs {:.5f} (|diff| = {:.2f} SE, SE {:.1e}); upper-half mass {:.4f} vs 0.75",
                      mean, truth, std::abs(mean - truth) / se, se, upper)};
}

Result spectral_gap_estimator() {
  int in_range = 0;
  double lo = 1, hi = 0;
  for (int rep = 0; rep < kGapReplicates; ++rep) {
    std::mt19937_64 rng(1000 + rep);
    std::normal_distribution<double> z;
    std::vector<double> x(100000);
    x[0] = z(rng) / std::sqrt(1 - 0.81);
    for (std::size_t i = 1; i < x.size(); ++i) x[i] = 0.9 * x[i - 1] + z(rng);
    const auto r = estimate_gap(x, 1);
    if (const auto* g = std::get_if<GapEstimate>(&r)) {
      in_range += (g->gamma_hat >= 0.05 && g->gamma_hat <= 0.2) ? 1 : 0;
      lo = std::min(lo, g->gamma_hat);
      hi = std::max(hi, g->gamma_hat);
    }
  }
  int iid_ok = 0;
  double iid_min = 1;
  for (int rep = 0; rep < kGapReplicates; ++rep) {
    std::mt19937_64 rng(5000 + rep);
    std::normal_distribution<double> z;
    std::vector<double> x(100000);
    for (auto& v : x) v = z(rng);
    const auto r = estimate_gap(x, 1);
    if (const auto* g = std::get_if<GapEstimate>(&r)) {
      iid_ok += g->gamma_hat >= kIidMinGap ? 1 : 0;
      iid_min = std::min(iid_min, g->gamma_hat);
    }
  }
  return {in_range >= kGapMinInRange && iid_ok == kGapReplicates,
          fmt::format("AR(1): {}/{} in [0.05, 0.2] (range {:.3f}..{:.3f}); iid: {}/{} >= 0.5 (min {:.3f})", in_range,
                      kGapReplicates, lo, hi, iid_ok, kGapReplicates, iid_min)};
}

Result jakstat_conservation() {
  const auto model = load_model_config(PSMC_ASSET_DIR "/jakstat/model.json");
  const auto systems = model.build_all();
  const auto grid = model.grid();
  const auto& space = systems.begin()->second.parameter_space();
  CounterRng rng(8, 0);
  double worst = 0.0;
  int failures = 0;
  for (int d = 0; d < kConservationDraws; ++d) {
    std::vector<double> th;
    for (const auto& b : space.bounds()) th.push_back(b.lower + b.width() * rng.uniform());
    for (const auto& [name, sys] : systems) {
      const auto res = integrate(sys, ParameterVector(th), grid, model.integrator);
      if (!res) {
        ++failures;
        continue;
      }
      const auto& traj = res.trajectory();
      const auto& names = sys.state_names();
      auto total = [&](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < names.size(); ++i) {
          if (names[i] == "STAT" || names[i] == "STATp") s += x[i];
          if (names[i] == "STATpd" || names[i][0] == 'X') s += 2 * x[i];
        }
        return s;
      };
      const double t0 = total(traj.row(0));
      for (std::size_t i = 0; i < traj.size(); ++i) worst = std::max(worst, std::abs(total(traj.row(i)) - t0) / t0);
    }
  }
  return {failures == 0 && worst <= kConservationRelTol,
          fmt::format("{} draws x {} conditions; worst relative drift {:.2e}; {} integration failures",
                      kConservationDraws, systems.size(), worst, failures)};
}

Result case_study() {
  const auto base = std::filesystem::temp_directory_path() / "psmc_acceptance_case_study";
  bool ok = true;
  std::string detail;
  for (int seed = 1; seed <= kCaseStudySeeds; ++seed) {
    app::PipelineOptions o;
    o.config = PSMC_ASSET_DIR "/jakstat/run.json";
    o.out = base / fmt::format("seed{}", seed);
    o.seed = static_cast<std::uint64_t>(seed);
    o.quiet = true;
    std::filesystem::remove_all(o.out);
    app::cmd_pipeline(o);
    std::ifstream in(o.out / "pipeline.json");
    const auto j = nlohmann::json::parse(in);
    std::map<std::string, nlohmann::json> props;
    for (const auto& p : j["properties"]) props[p["name"].get<std::string>()] = p;
    const double p1 = props.at("psi1")["p_hat_store"].get<double>();
    const bool seed_ok = props.at("psi1")["decision"] == "H0" && props.at("psi2")["decision"] == "H0" &&
                         props.at("psi3")["decision"] == "H1" && p1 >= kPsi1Low && p1 <= kPsi1High;
    ok = ok && seed_ok;
    detail += fmt::format(" seed {}: {}/{}/{} p1={:.3f} gamma={:.4f};", seed,
                          props.at("psi1")["decision"].get<std::string>(),
                          props.at("psi2")["decision"].get<std::string>(),
                          props.at("psi3")["decision"].get<std::string>(), p1, j["gamma_used"].get<double>());
  }
  return {ok, detail};
}

Result decoupling() {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0;
  std::string detail;
  std::uint64_t total_n = 0;
  for (int c = 0; c < kDecouplingConfigs; ++c) {
    const std::size_t d = 1 + c % 3;
    std::vector<std::string> names;
    std::vector<Interval> bounds;
    std::vector<double> centre, scale, sigmas;
    for (std::size_t i = 0; i < d; ++i) {
      names.push_back(fmt::format("x{}", i));
      bounds.push_back({-3, 3});
      centre.push_back(-1 + 2 * u(rng));
      scale.push_back(0.5 + 1.5 * u(rng));
      sigmas.push_back(0.2 + 1.3 * u(rng));
    }
    // x_i(t) = theta_i t observed through a random BLTL formula.
    OdeSystem sys(names, std::vector<double>(d, 0.0), {}, {},
                  [](auto, auto, std::span<const double> th, double, std::span<double> dx) {
                    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = th[i];
                  },
                  {}, ParameterSpace(names, bounds));
    const auto grid = TimeGrid::uniform(10, 11);
    const int bound = 1 + static_cast<int>(u(rng) * 9);
    const double lo = -10 + 10 * u(rng);
    const std::string text = fmt::format("{}<={} [{:.3f} <= x{} <= {:.3f}]", u(rng) < 0.5 ? "F" : "G", bound, lo,
                                         static_cast<std::size_t>(u(rng) * d), lo + 2 + 10 * u(rng));
    Verifier verifier(sys, grid, bltl::parse(text, names));
    ThetaPredicate verify = [&verifier](const ParameterVector& th) { return verifier(th); };

    Posterior post(UniformBoxPrior(ParameterSpace(names, bounds)), [=](const ParameterVector& th) {
      double s = 0.0;
      for (std::size_t i = 0; i < th.size(); ++i) s -= 0.5 * std::pow((th[i] - centre[i]) / scale[i], 2);
      return s;
    });
    GaussianProposal prop({sigmas});
    const double r = 0.2 + 0.6 * u(rng);
    const double delta = 0.05 + 0.1 * u(rng) * std::min(1.0, std::min(r, 1 - r) / 0.2);
    const HypothesisSpec spec{r, std::min(delta, 0.99 * std::min(r, 1 - r)), 0.01 + 0.09 * u(rng)};
    const auto plan = plan_fixed_test(spec, 0.1 + 0.4 * u(rng));
    const std::uint64_t seed = rng();
    const std::uint64_t burn = static_cast<std::uint64_t>(500 * u(rng));

    MetropolisChain live(post, prop, seed);
    live.burn_in(burn);
    LiveChainSource live_src(live, verify);
    const auto a = fixed_test(spec, plan, live_src);

    const auto store = run_chain(post, prop, {burn, plan.N, seed});
    StoreSource replay(store, verify, 1 + c % 4);
    const auto b = fixed_test(spec, plan, replay);
    total_n += plan.N;
    if (a.successes != b.successes || a.n != b.n || a.decision != b.decision) {
      ++mismatches;
      detail += fmt::format(" config {} differs;", c);
    }
  }
  return {mismatches == 0,
          fmt::format("{} of {} configs differ ({} samples per side in total){}", mismatches, kDecouplingConfigs,
                      total_n, detail)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Result()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "BLTL oracle equivalence", bltl_oracle},
      {2, "sample-size formulas", sample_size_formulas},
      {3, "fixed-test error rates below bound", fixed_error_rates},
      {4, "sequential-test soundness", sequential_soundness},
      {5, "stopping-time shape", stopping_time_shape},
      {6, "MCMC correctness", mcmc_correctness},
      {7, "spectral-gap estimator", spectral_gap_estimator},
      {8, "JAK-STAT conservation", jakstat_conservation},
      {9, "JAK-STAT case study", case_study},
      {10, "live vs stored decoupling", decoupling},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  bool all_ok = true;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("{} criterion {:>2} {}: {} [{:.1f}s]\n", r.pass ? "PASS" : "FAIL", c.id, c.name, r.detail, secs);
    std::fflush(stdout);
    all_ok = all_ok && r.pass;
  }
  return all_ok ? 0 : 1;
}
