#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "psmc/smc/hypothesis_test.hpp"

namespace psmc::app {

/// Replicated hypothesis tests on the two-state chain, whose satisfaction
/// probability p and spectral gap gamma are known exactly.
struct FixedStudyConfig {
  double p = 0.8;
  double gamma = 0.1;
  std::vector<double> deltas{0.03, 0.05, 0.1};
  std::vector<std::uint64_t> ns{1000, 10000, 100000};
  std::uint64_t replicas = 500;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
};

/// r = p - delta, so H0 holds and every H1 decision is an error.
struct FixedStudyRow {
  std::uint64_t replica;
  double delta;
  double r;
  std::uint64_t n;
  std::uint64_t successes;
  Decision decision;
  bool error;
};

std::vector<FixedStudyRow> run_fixed_study(const FixedStudyConfig& config);

struct SequentialStudyConfig {
  double p = 0.8;
  double gamma = 0.1;
  std::vector<double> rs{0.75};
  std::vector<double> deltas{0.05};
  std::vector<double> epsilons{0.01};
  std::uint64_t replicas = 500;
  std::uint64_t seed = 1;
  std::uint64_t max_samples = 10000000;
  std::uint64_t batch_size = 1;
  unsigned jobs = 1;
};

struct SequentialStudyRow {
  std::uint64_t replica;
  double r;
  double delta;
  double epsilon;
  double M;
  std::uint64_t fixed_N;  // the fixed test's sample size for the same settings
  std::uint64_t stopping_time;
  std::uint64_t successes;
  Decision decision;
  bool error;
};

std::vector<SequentialStudyRow> run_sequential_study(const SequentialStudyConfig& config);

/// Whether `decision` is wrong for true probability p: H1 when p >= r + delta,
/// H0 when p <= r - delta. Inside the indifference region nothing is an
/// error; Undecided never is.
bool is_error(Decision decision, double p, double r, double delta);

void write_fixed_study(const std::vector<FixedStudyRow>& rows, const std::filesystem::path& path);
void write_sequential_study(const std::vector<SequentialStudyRow>& rows, const std::filesystem::path& path);
std::vector<FixedStudyRow> read_fixed_study(const std::filesystem::path& path);
std::vector<SequentialStudyRow> read_sequential_study(const std::filesystem::path& path);

}  // namespace psmc::app
