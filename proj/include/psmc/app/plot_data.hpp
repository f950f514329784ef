#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "psmc/app/study.hpp"
#include "psmc/posterior/sample_store.hpp"

namespace psmc::app {

/// error_rates.csv: n,delta,replicas,errors,error_rate,bound
/// bound is exp(-gamma delta^2 n).
struct ErrorRateRow {
  std::uint64_t n;
  double delta;
  std::uint64_t replicas;
  std::uint64_t errors;
  double error_rate;
  double bound;
};

std::vector<ErrorRateRow> error_rate_table(const std::vector<FixedStudyRow>& rows, double gamma);

/// stopping_times.csv: source,r,delta,epsilon,runs,decided,errors,mean,median,min,max,fixed_N
/// mean/median/min/max are over decided runs only (empty when none decided).
struct StoppingTimeRow {
  std::string source;
  double r;
  double delta;
  double epsilon;
  std::uint64_t runs;
  std::uint64_t decided;
  std::uint64_t errors;
  double mean;
  double median;
  std::uint64_t min;
  std::uint64_t max;
  std::uint64_t fixed_N;
};

std::vector<StoppingTimeRow> stopping_time_table(const std::vector<SequentialStudyRow>& rows);

/// param_hist.csv: parameter,bin,lower,upper,count
struct HistogramRow {
  std::string parameter;
  std::size_t bin;
  double lower;
  double upper;
  std::uint64_t count;
};

/// param_pairs.csv: param_x,param_y,bin_x,bin_y,count (every cell, zeros included)
struct PairRow {
  std::string param_x;
  std::string param_y;
  std::size_t bin_x;
  std::size_t bin_y;
  std::uint64_t count;
};

/// Multiplicity-weighted marginal histograms over the sample range.
std::vector<HistogramRow> parameter_histograms(const SampleStore& store, std::size_t bins);
std::vector<PairRow> parameter_pairs(const SampleStore& store, std::size_t bins);

/// Builds every table the contents of `results` allow:
///   study_fixed.csv       -> error_rates.csv (needs `gamma`, stored in study.json)
///   study_sequential.csv  -> stopping_times.csv
///   verify_*.json         -> stopping_times.csv (one row per report)
///   samples.csv           -> param_hist.csv, param_pairs.csv
/// Returns the files written. Throws DataError when nothing usable is found.
std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& results,
                                                   const std::filesystem::path& out_dir, std::size_t bins = 20);

}  // namespace psmc::app
