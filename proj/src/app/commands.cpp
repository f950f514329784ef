#include "psmc/app/commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <variant>

#include <fmt/format.h>
#include <json.hpp>

#include "psmc/app/plot_data.hpp"
#include "psmc/diagnostics/spectral_gap.hpp"
#include "psmc/error.hpp"
#include "psmc/model/integrator.hpp"
#include "psmc/posterior/chain.hpp"
#include "psmc/smc/sample_size.hpp"
#include "psmc/smc/verifier.hpp"

namespace psmc::app {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(Decision decision) {
  switch (decision) {
    case Decision::kH0: return kExitH0;
    case Decision::kH1: return kExitH1;
    case Decision::kUndecided: return kExitUndecided;
  }
  return kExitError;
}

fs::path output_dir(const fs::path& flag, const RunConfig* config) {
  if (!flag.empty()) return flag;
  if (config && !config->output_dir.empty()) return config->resolve(config->output_dir);
  if (const char* env = std::getenv("PSMC_OUTPUT_DIR"); env && *env) return env;
  return "results";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_json(const json& j, const fs::path& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << "\n";
}

// Errors from a pipeline stage carry the stage name.
template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const std::exception& e) {
    throw Error(fmt::format("[{}] {}", name, e.what()));
  }
}

std::uint64_t require_burn_in(const RunConfig& config) {
  if (!config.chain.burn_in) {
    throw ConfigError("chain.burn_in is required (there is no default burn-in length)");
  }
  return *config.chain.burn_in;
}

GaussianProposal make_proposal(const Workspace& ws) {
  ProposalSpec spec{ws.config.chain.proposal_sigmas};
  if (spec.sigmas.empty()) throw ConfigError("chain.proposal_sigmas is required");
  try {
    spec.validate(ws.model.parameters.size());
  } catch (const ValidationError& e) {
    throw ConfigError(fmt::format("chain.proposal_sigmas: {}", e.what()));
  }
  return GaussianProposal(spec);
}

Posterior make_posterior(const Workspace& ws) {
  OdeLikelihood likelihood(ws.systems, ws.grid, ws.data, ws.model.integrator);
  return Posterior(UniformBoxPrior(ws.model.parameter_space()), likelihood);
}

ProgressCallback progress_printer(const char* label, bool quiet) {
  if (quiet) return {};
  return [label](std::uint64_t done, std::uint64_t total, double acceptance) {
    fmt::print(stderr, "[{}] {}/{} steps, acceptance {:.3f}\n", label, done, total, acceptance);
  };
}

std::uint64_t progress_every(const RunConfig& config, std::uint64_t steps) {
  if (config.chain.progress_every) return config.chain.progress_every;
  return std::max<std::uint64_t>(1, steps / 10);
}

struct TestSettings {
  TestMode mode;
  double r;
  double delta;
  double epsilon;
  double gamma;
  std::optional<std::uint64_t> cap;
  std::uint64_t batch_size;
  unsigned jobs;
};

Verifier make_verifier(const Workspace& ws, const bltl::Property& p) {
  return Verifier(ws.systems.at(p.condition), ws.grid, p.formula, ws.model.integrator);
}

json run_test(const Workspace& ws, const bltl::Property& p, const TestSettings& t, SatisfactionSource& source,
              const Verifier& verifier, std::uint64_t seed, const char* source_name,
              const std::function<std::uint64_t()>& verifications) {
  const auto start = Clock::now();
  const HypothesisSpec spec{t.r, t.delta, t.epsilon};
  spec.validate();
  json j = {{"property", p.name},
            {"formula", p.text},
            {"condition", p.condition},
            {"mode", to_string(t.mode)},
            {"r", t.r},
            {"delta", t.delta},
            {"epsilon", t.epsilon},
            {"gamma_used", t.gamma},
            {"source", source_name},
            {"fixed_N", fixed_sample_size(t.epsilon, t.delta, t.gamma)}};
  TestOutcome outcome{Decision::kUndecided, 0, 0};
  if (t.mode == TestMode::kFixed) {
    const auto plan = plan_fixed_test(spec, t.gamma);
    outcome = fixed_test(spec, plan, source);
    j["N"] = plan.N;
  } else {
    const auto plan = plan_sequential_test(spec, t.gamma, t.cap, t.batch_size);
    outcome = sequential_test(spec, plan, source);
    j["M"] = plan.M;
    j["batch_size"] = t.batch_size;
    j["max_samples"] = t.cap ? json(*t.cap) : json(nullptr);
  }
  const char* reasons[] = {"decided", "cap reached", "samples exhausted"};
  j["decision"] = to_string(outcome.decision);
  j["stop_reason"] = reasons[static_cast<int>(outcome.reason)];
  j["n"] = outcome.n;
  j["S"] = outcome.successes;
  j["p_hat"] = outcome.p_hat();
  j["decided_at"] = outcome.decided_at;
  j["verifications"] = verifications();
  j["integration_failures"] = verifier.failure_count();
  j["wall_time_s"] = seconds_since(start);
  j["config_hash"] = ws.config_hash;
  j["seed"] = seed;
  return j;
}

json gap_json(const GapResult& result, const std::string& hash, std::uint64_t seed) {
  json j;
  if (const auto* g = std::get_if<GapEstimate>(&result)) {
    j = {{"sufficient", true}, {"gamma_hat", g->gamma_hat}, {"eta", g->eta}, {"iterations", g->iterations},
         {"n", g->n_used}, {"restarted", g->restarted}};
  } else {
    const auto& need = std::get<InsufficientData>(result);
    j = {{"sufficient", false},         {"gamma_hat", need.provisional.gamma_hat},
         {"eta", need.provisional.eta}, {"iterations", need.provisional.iterations},
         {"n", need.provisional.n_used}, {"required_n", need.required_n}};
  }
  j["config_hash"] = hash;
  j["seed"] = seed;
  return j;
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return fnv1a_hex(buffer.str());
}

}  // namespace

int cmd_simulate(const SimulateOptions& o) {
  ModelConfig model;
  if (!o.config.empty()) {
    model = load_workspace(load_run_config(o.config), false, false).model;
  } else if (!o.model.empty()) {
    model = load_model_config(o.model);
  } else {
    throw ConfigError("simulate needs --config or --model");
  }
  const auto systems = model.build_all();
  const std::string condition = o.condition.empty() ? systems.begin()->first : o.condition;
  if (!systems.count(condition)) throw ConfigError(fmt::format("unknown condition '{}'", condition));
  const auto& system = systems.at(condition);
  const ParameterVector theta(o.theta);
  system.parameter_space().validate(theta);
  const auto result = integrate(system, theta, model.grid(), model.integrator);
  const auto& traj = result.trajectory();

  std::ofstream file;
  if (!o.out.empty()) {
    if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
    file.open(o.out);
    if (!file) throw Error(fmt::format("cannot write '{}'", o.out.string()));
  }
  std::ostream& out = o.out.empty() ? std::cout : file;
  out << "time_min";
  for (const auto& n : system.state_names()) out << "," << n;
  for (const auto& obs : system.observables()) out << "," << obs.name;
  out << "\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << fmt::format("{}", traj.grid()[i]);
    for (double v : traj.row(i)) out << fmt::format(",{}", v);
    for (const auto& obs : system.observables()) out << fmt::format(",{}", obs.apply(traj.row(i)));
    out << "\n";
  }
  return kExitSuccess;
}

int cmd_sample(const SampleOptions& o) {
  const auto start = Clock::now();
  auto config = load_run_config(o.config);
  if (o.burn_in) config.chain.burn_in = *o.burn_in;
  if (o.steps) config.chain.steps = *o.steps;
  if (o.seed) config.chain.seed = *o.seed;
  const auto ws = load_workspace(config, true, false);
  const auto burn_in = require_burn_in(config);
  if (config.chain.steps == 0) throw ConfigError("chain.steps must be positive");
  const auto posterior = make_posterior(ws);
  const auto proposal = make_proposal(ws);

  MetropolisChain chain(posterior, proposal, config.chain.seed);
  chain.burn_in(burn_in);
  SampleStore store(ws.model.parameter_space().names(), burn_in, config.chain.seed);
  chain.record(config.chain.steps, store, {}, progress_printer("sample", o.quiet),
               progress_every(config, config.chain.steps));

  const auto dir = output_dir(o.out, &config);
  fs::create_directories(dir);
  store.save(dir / "samples.csv");
  write_json({{"steps", store.total_steps()},
              {"burn_in", burn_in},
              {"records", store.records().size()},
              {"acceptance_rate", chain.stats().acceptance_rate()},
              {"wall_time_s", seconds_since(start)},
              {"config_hash", ws.config_hash},
              {"seed", config.chain.seed}},
             dir / "sample.json");
  return kExitSuccess;
}

int cmd_gap(const GapOptions& o) {
  const auto store = SampleStore::load(o.store);
  const auto max_steps = o.max_steps.value_or(UINT64_MAX);
  std::vector<double> history;
  if (o.expand) {
    history = store.expanded(max_steps);
  } else {
    history = store.distinct();
  }
  const auto result = estimate_gap(history, store.dims());
  write_json(gap_json(result, file_hash(o.store), store.seed()), o.out);
  return std::holds_alternative<GapEstimate>(result) ? kExitSuccess : kExitUndecided;
}

int cmd_verify(const VerifyOptions& o) {
  const auto config = load_run_config(o.config);
  const auto ws = load_workspace(config, o.live, true);
  const auto& p = bltl::find_property(ws.properties, o.property);

  TestSettings t{o.mode ? test_mode_from_string(*o.mode) : config.test.mode,
                 o.r.value_or(p.r),
                 o.delta.value_or(p.delta),
                 o.epsilon.value_or(config.test.epsilon),
                 0.0,
                 o.max_samples ? o.max_samples : config.test.max_samples,
                 o.batch_size.value_or(config.test.batch_size),
                 o.jobs.value_or(config.test.jobs)};
  if (o.live == !o.store.empty()) throw ConfigError("verify needs exactly one of --store or --live");

  std::optional<SampleStore> store;
  if (!o.store.empty()) store = SampleStore::load(o.store);

  if (o.gamma) {
    t.gamma = *o.gamma;
  } else if (o.gap_from_store) {
    if (!store) throw ConfigError("--gap-from-store needs --store");
    const auto result = estimate_gap(store->expanded(), store->dims());
    if (const auto* need = std::get_if<InsufficientData>(&result)) {
      throw DataError(fmt::format("store too short for a trusted gap estimate: {} samples required, {} stored",
                                  need->required_n, store->total_steps()));
    }
    t.gamma = std::get<GapEstimate>(result).gamma_hat;
  } else if (config.test.gamma) {
    t.gamma = *config.test.gamma;
  } else {
    throw ConfigError("no spectral gap: pass --gamma, --gap-from-store, or set test.gamma");
  }

  const auto verifier = make_verifier(ws, p);
  ThetaPredicate predicate = [&verifier](const ParameterVector& th) { return verifier(th); };
  json report;
  if (store) {
    StoreSource source(*store, predicate, t.jobs, std::max<std::uint64_t>(256, t.batch_size));
    report = run_test(ws, p, t, source, verifier, store->seed(), "store", [&] { return source.verifications(); });
  } else {
    if (t.mode == TestMode::kSequential && !t.cap) {
      throw ConfigError("a live sequential test needs --cap (or test.max_samples)");
    }
    const auto seed = o.seed.value_or(config.chain.seed);
    const auto posterior = make_posterior(ws);
    const auto proposal = make_proposal(ws);
    MetropolisChain chain(posterior, proposal, seed);
    chain.burn_in(require_burn_in(config));
    LiveChainSource source(chain, predicate);
    report = run_test(ws, p, t, source, verifier, seed, "live", [&] { return source.verifications(); });
  }
  const auto out = o.out.empty() ? output_dir({}, &config) / fmt::format("verify_{}.json", p.name) : o.out;
  write_json(report, out);
  if (!o.quiet) {
    fmt::print(stderr, "{}: {} (n={}, S={}, p_hat={:.4f})\n", p.name, report["decision"].get<std::string>(),
               report["n"].get<std::uint64_t>(), report["S"].get<std::uint64_t>(), report["p_hat"].get<double>());
  }
  return exit_code_for(report["decision"].get<std::string>() == "H0"   ? Decision::kH0
                       : report["decision"].get<std::string>() == "H1" ? Decision::kH1
                                                                       : Decision::kUndecided);
}

namespace {

json estimate_json(const Workspace& ws, const bltl::Property& p, const SampleStore& store, unsigned jobs) {
  const auto start = Clock::now();
  const auto verifier = make_verifier(ws, p);
  const auto est = estimate_probability(store, [&](const ParameterVector& th) { return verifier(th); }, jobs);
  return {{"property", p.name},
          {"p_hat", est.p_hat},
          {"n", est.n},
          {"satisfied", est.satisfied},
          {"distinct_verified", est.distinct_verified},
          {"integration_failures", verifier.failure_count()},
          {"wall_time_s", seconds_since(start)},
          {"config_hash", ws.config_hash},
          {"seed", store.seed()}};
}

}  // namespace

int cmd_estimate(const EstimateOptions& o) {
  const auto config = load_run_config(o.config);
  const auto ws = load_workspace(config, false, true);
  const auto store = SampleStore::load(o.store);
  const auto dir = output_dir(o.out, &config);
  const unsigned jobs = o.jobs.value_or(config.test.jobs);
  for (const auto& p : ws.properties) {
    if (!o.property.empty() && p.name != o.property) continue;
    const auto j = estimate_json(ws, p, store, jobs);
    write_json(j, dir / fmt::format("estimate_{}.json", p.name));
    fmt::print("{}: p_hat={:.4f} (n={})\n", p.name, j["p_hat"].get<double>(), j["n"].get<std::uint64_t>());
  }
  if (!o.property.empty()) (void)bltl::find_property(ws.properties, o.property);
  return kExitSuccess;
}

int cmd_plot_data(const PlotDataOptions& o) {
  const auto out = o.out.empty() ? o.results / "plot_data" : o.out;
  for (const auto& path : write_plot_data(o.results, out, o.bins)) fmt::print("{}\n", path.string());
  return kExitSuccess;
}

int cmd_pipeline(const PipelineOptions& o) {
  const auto start = Clock::now();
  auto config = stage("config", [&] { return load_run_config(o.config); });
  if (o.seed) config.chain.seed = *o.seed;
  if (o.jobs) config.test.jobs = *o.jobs;
  const auto ws = stage("config", [&] { return load_workspace(config, true, true); });
  const auto dir = output_dir(o.out, &config);
  fs::create_directories(dir);
  const auto burn_in = stage("config", [&] { return require_burn_in(config); });
  if (config.chain.steps == 0) throw Error("[config] chain.steps must be positive");
  const auto seed = config.chain.seed;

  const auto posterior = stage("sample", [&] { return make_posterior(ws); });
  const auto proposal = stage("sample", [&] { return make_proposal(ws); });
  MetropolisChain chain = stage("sample", [&] { return MetropolisChain(posterior, proposal, seed); });
  SampleStore store(ws.model.parameter_space().names(), burn_in, seed);
  const auto progress = progress_printer("sample", o.quiet);
  stage("sample", [&] {
    chain.burn_in(burn_in);
    chain.record(config.chain.steps, store, {}, progress, progress_every(config, config.chain.steps));
    store.save(dir / "samples.csv");
  });

  // Gap estimate on the stored history; extend the chain while the estimate
  // asks for more data, or while a fixed test needs more samples than stored.
  double gamma = 0.0;
  json gap_report;
  stage("gap", [&] {
    for (int round = 0;; ++round) {
      std::uint64_t need = 0;
      if (config.test.gamma) {
        gamma = *config.test.gamma;
        gap_report = {{"gamma_hat", gamma}, {"from_config", true}, {"config_hash", ws.config_hash}, {"seed", seed}};
      } else {
        const auto result = estimate_gap(store.expanded(), store.dims());
        gap_report = gap_json(result, ws.config_hash, seed);
        if (const auto* g = std::get_if<GapEstimate>(&result)) {
          gamma = g->gamma_hat;
        } else {
          need = std::get<InsufficientData>(result).required_n;
        }
      }
      if (!need && config.test.mode == TestMode::kFixed) {
        for (const auto& p : ws.properties) need = std::max(need, fixed_sample_size(config.test.epsilon, p.delta, gamma));
      }
      if (need <= store.total_steps()) break;
      if (round == 5) throw Error(fmt::format("still {} samples short after 5 extensions", need - store.total_steps()));
      if (!o.quiet) fmt::print(stderr, "[gap] extending the chain to {} samples\n", need);
      chain.record(need - store.total_steps(), store, {}, progress, progress_every(config, need));
      store.save(dir / "samples.csv");
    }
    gap_report["restarted"] = store.total_steps() > config.chain.steps;
    write_json(gap_report, dir / "gap.json");
  });
  write_json({{"steps", store.total_steps()},
              {"burn_in", burn_in},
              {"records", store.records().size()},
              {"acceptance_rate", chain.stats().acceptance_rate()},
              {"config_hash", ws.config_hash},
              {"seed", seed}},
             dir / "sample.json");

  json summary = {{"config_hash", ws.config_hash}, {"seed", seed}, {"gamma_used", gamma},
                  {"samples", store.total_steps()}, {"properties", json::array()}};
  for (const auto& p : ws.properties) {
    stage("verify", [&] {
      const TestSettings t{config.test.mode, p.r, p.delta, config.test.epsilon, gamma,
                           config.test.max_samples, config.test.batch_size, config.test.jobs};
      const auto verifier = make_verifier(ws, p);
      StoreSource source(store, [&](const ParameterVector& th) { return verifier(th); }, t.jobs,
                         std::max<std::uint64_t>(256, t.batch_size));
      auto report = run_test(ws, p, t, source, verifier, seed, "store", [&] { return source.verifications(); });
      write_json(report, dir / fmt::format("verify_{}.json", p.name));
      const auto est = estimate_json(ws, p, store, config.test.jobs);
      write_json(est, dir / fmt::format("estimate_{}.json", p.name));
      summary["properties"].push_back({{"name", p.name},
                                       {"r", p.r},
                                       {"decision", report["decision"]},
                                       {"n", report["n"]},
                                       {"S", report["S"]},
                                       {"p_hat_store", est["p_hat"]}});
      if (!o.quiet) {
        fmt::print(stderr, "[verify] {}: {} (n={}), p_hat over store {:.4f}\n", p.name,
                   report["decision"].get<std::string>(), report["n"].get<std::uint64_t>(), est["p_hat"].get<double>());
      }
    });
  }
  summary["wall_time_s"] = seconds_since(start);
  write_json(summary, dir / "pipeline.json");
  return kExitSuccess;
}

int cmd_study(const StudyOptions& o) {
  const auto dir = output_dir(o.out, nullptr);
  fs::create_directories(dir);
  json meta = {{"p", o.fixed.p}, {"gamma", o.fixed.gamma}, {"seed", o.fixed.seed}};
  if (o.run_fixed) {
    write_fixed_study(run_fixed_study(o.fixed), dir / "study_fixed.csv");
    meta["fixed"] = {{"deltas", o.fixed.deltas}, {"ns", o.fixed.ns}, {"replicas", o.fixed.replicas}};
  }
  if (o.run_sequential) {
    write_sequential_study(run_sequential_study(o.sequential), dir / "study_sequential.csv");
    meta["sequential"] = {{"rs", o.sequential.rs},
                          {"deltas", o.sequential.deltas},
                          {"epsilons", o.sequential.epsilons},
                          {"replicas", o.sequential.replicas},
                          {"max_samples", o.sequential.max_samples}};
  }
  meta["config_hash"] = fnv1a_hex(meta.dump());
  write_json(meta, dir / "study.json");
  return kExitSuccess;
}

}  // namespace psmc::app
