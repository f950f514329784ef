// psmc: statistical model checking on posterior samples of ODE models.
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "psmc/app/commands.hpp"
#include "psmc/error.hpp"

using namespace psmc::app;

int main(int argc, char** argv) {
  CLI::App app{"Statistical model checking over MCMC posterior samples"};
  app.require_subcommand(1);
  int code = kExitSuccess;

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Integrate the model at one parameter vector");
  simulate->add_option("--config", sim.config, "Run config JSON");
  simulate->add_option("--model", sim.model, "Model JSON (instead of --config)");
  simulate->add_option("--theta", sim.theta, "Parameter values in model order")->required()->delimiter(',');
  simulate->add_option("--condition", sim.condition, "Input condition (default: first)");
  simulate->add_option("-o,--out", sim.out, "CSV file (default: stdout)");
  simulate->callback([&] { code = cmd_simulate(sim); });

  SampleOptions smp;
  auto* sample = app.add_subcommand("sample", "Run the Metropolis chain and store the samples");
  sample->add_option("--config", smp.config)->required();
  sample->add_option("--burn-in", smp.burn_in);
  sample->add_option("--steps", smp.steps);
  sample->add_option("--seed", smp.seed);
  sample->add_option("-o,--out", smp.out, "Output directory");
  sample->add_flag("-q,--quiet", smp.quiet);
  sample->callback([&] { code = cmd_sample(smp); });

  GapOptions gp;
  bool distinct = false;
  auto* gap = app.add_subcommand("gap", "Estimate the spectral gap of a stored chain");
  gap->add_option("--store", gp.store, "samples.csv")->required()->check(CLI::ExistingFile);
  gap->add_flag("--distinct", distinct, "Use distinct states only, ignoring multiplicities");
  gap->add_option("--max-steps", gp.max_steps);
  gap->add_option("-o,--out", gp.out, "JSON file (default: stdout)");
  gap->callback([&] {
    gp.expand = !distinct;
    code = cmd_gap(gp);
  });

  VerifyOptions ver;
  unsigned verify_jobs = 0;
  auto* verify = app.add_subcommand("verify", "Test one property against the posterior");
  verify->add_option("--config", ver.config)->required();
  verify->add_option("--property", ver.property)->required();
  verify->add_option("--r", ver.r);
  verify->add_option("--delta", ver.delta);
  verify->add_option("--epsilon", ver.epsilon);
  verify->add_option("--gamma", ver.gamma);
  verify->add_flag("--gap-from-store", ver.gap_from_store);
  verify->add_option("--mode", ver.mode)->check(CLI::IsMember({"fixed", "sequential"}));
  verify->add_option("--batch", ver.batch_size);
  verify->add_option("--cap", ver.max_samples);
  verify->add_option("--seed", ver.seed);
  auto* store_opt = verify->add_option("--store", ver.store)->check(CLI::ExistingFile);
  verify->add_flag("--live", ver.live)->excludes(store_opt);
  verify->add_option("--jobs", verify_jobs);
  verify->add_option("-o,--out", ver.out);
  verify->add_flag("-q,--quiet", ver.quiet);
  verify->callback([&] {
    if (verify_jobs) ver.jobs = verify_jobs;
    code = cmd_verify(ver);
  });

  EstimateOptions est;
  unsigned estimate_jobs = 0;
  auto* estimate = app.add_subcommand("estimate", "Fraction of stored samples satisfying each property");
  estimate->add_option("--config", est.config)->required();
  estimate->add_option("--store", est.store)->required()->check(CLI::ExistingFile);
  estimate->add_option("--property", est.property);
  estimate->add_option("--jobs", estimate_jobs);
  estimate->add_option("-o,--out", est.out, "Output directory");
  estimate->callback([&] {
    if (estimate_jobs) est.jobs = estimate_jobs;
    code = cmd_estimate(est);
  });

  PlotDataOptions pd;
  auto* plot = app.add_subcommand("plot-data", "CSV tables behind the result figures");
  plot->add_option("results", pd.results, "Results directory")->required();
  plot->add_option("-o,--out", pd.out);
  plot->add_option("--bins", pd.bins)->check(CLI::PositiveNumber);
  plot->callback([&] { code = cmd_plot_data(pd); });

  PipelineOptions pl;
  unsigned pipeline_jobs = 0;
  auto* pipeline = app.add_subcommand("pipeline", "sample, gap, then verify every property");
  pipeline->add_option("--config", pl.config)->required();
  pipeline->add_option("-o,--out", pl.out);
  pipeline->add_option("--seed", pl.seed);
  pipeline->add_option("--jobs", pipeline_jobs);
  pipeline->add_flag("-q,--quiet", pl.quiet);
  pipeline->callback([&] {
    if (pipeline_jobs) pl.jobs = pipeline_jobs;
    code = cmd_pipeline(pl);
  });

  StudyOptions st;
  bool only_fixed = false, only_sequential = false;
  auto* study = app.add_subcommand("study", "Replicated tests on a two-state chain with known answer");
  study->add_option("--p", st.fixed.p);
  study->add_option("--gamma", st.fixed.gamma);
  study->add_option("--replicas", st.fixed.replicas);
  study->add_option("--seed", st.fixed.seed);
  study->add_option("--deltas", st.fixed.deltas)->delimiter(',');
  study->add_option("--ns", st.fixed.ns)->delimiter(',');
  study->add_option("--rs", st.sequential.rs, "r grid for the sequential study")->delimiter(',');
  study->add_option("--seq-deltas", st.sequential.deltas)->delimiter(',');
  study->add_option("--epsilons", st.sequential.epsilons)->delimiter(',');
  study->add_option("--cap", st.sequential.max_samples);
  study->add_option("--batch", st.sequential.batch_size);
  study->add_option("--jobs", st.fixed.jobs);
  study->add_flag("--fixed-only", only_fixed);
  study->add_flag("--sequential-only", only_sequential);
  study->add_option("-o,--out", st.out);
  study->callback([&] {
    st.sequential.p = st.fixed.p;
    st.sequential.gamma = st.fixed.gamma;
    st.sequential.replicas = st.fixed.replicas;
    st.sequential.seed = st.fixed.seed;
    st.sequential.jobs = st.fixed.jobs;
    st.run_fixed = !only_sequential;
    st.run_sequential = !only_fixed;
    code = cmd_study(st);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitError;
  }
  return code;
}
