#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "psmc/app/run_config.hpp"
#include "psmc/app/study.hpp"
#include "psmc/smc/hypothesis_test.hpp"

namespace psmc::app {

/// Process exit codes. Errors are reported as kError.
enum ExitCode : int { kExitH0 = 0, kExitSuccess = 0, kExitH1 = 1, kExitUndecided = 2, kExitError = 3 };

int exit_code_for(Decision decision);

/// Output directory: explicit flag, else the config's output_dir, else
/// $PSMC_OUTPUT_DIR, else ./results.
std::filesystem::path output_dir(const std::filesystem::path& flag, const RunConfig* config);

struct SimulateOptions {
  std::filesystem::path config;  // run config, or
  std::filesystem::path model;   // a model file directly
  std::vector<double> theta;
  std::string condition;  // defaults to the first condition
  std::filesystem::path out;  // CSV path; stdout when empty
};
/// Writes time, every state and every observable at each grid time.
int cmd_simulate(const SimulateOptions& options);

struct SampleOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> burn_in;
  std::optional<std::uint64_t> steps;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;  // directory
  bool quiet = false;
};
/// Runs the chain; writes samples.csv and sample.json.
int cmd_sample(const SampleOptions& options);

struct GapOptions {
  std::filesystem::path store;
  bool expand = true;  // use the multiplicity-expanded history
  std::optional<std::uint64_t> max_steps;
  std::filesystem::path out;  // JSON path; stdout when empty
};
/// Exit 0 when the estimate is accepted, 2 when more samples are required.
int cmd_gap(const GapOptions& options);

struct VerifyOptions {
  std::filesystem::path config;
  std::string property;
  std::optional<double> r;
  std::optional<double> delta;
  std::optional<double> epsilon;
  std::optional<double> gamma;
  bool gap_from_store = false;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> batch_size;
  std::optional<std::uint64_t> max_samples;
  std::optional<std::uint64_t> seed;
  std::filesystem::path store;  // replay this store, or
  bool live = false;            // run a fresh chain
  std::optional<unsigned> jobs;
  std::filesystem::path out;  // JSON path; <output_dir>/verify_<property>.json when empty
  bool quiet = false;
};
int cmd_verify(const VerifyOptions& options);

struct EstimateOptions {
  std::filesystem::path config;
  std::string property;  // every property when empty
  std::filesystem::path store;
  std::optional<unsigned> jobs;
  std::filesystem::path out;  // directory
};
int cmd_estimate(const EstimateOptions& options);

struct PlotDataOptions {
  std::filesystem::path results;
  std::filesystem::path out;  // defaults to <results>/plot_data
  std::size_t bins = 20;
};
int cmd_plot_data(const PlotDataOptions& options);

struct PipelineOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  bool quiet = false;
};
/// sample -> gap -> verify and estimate for every property. Exit 0 once every
/// stage has run; the decisions are in the reports.
int cmd_pipeline(const PipelineOptions& options);

struct StudyOptions {
  FixedStudyConfig fixed;
  SequentialStudyConfig sequential;
  bool run_fixed = true;
  bool run_sequential = true;
  std::filesystem::path out;
};
/// Replicated tests on the two-state chain; writes study_fixed.csv,
/// study_sequential.csv and study.json for plot-data.
int cmd_study(const StudyOptions& options);

}  // namespace psmc::app
