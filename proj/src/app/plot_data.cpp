#include "psmc/app/plot_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "psmc/error.hpp"
#include "psmc/smc/sample_size.hpp"

namespace psmc::app {

std::vector<ErrorRateRow> error_rate_table(const std::vector<FixedStudyRow>& rows, double gamma) {
  std::map<std::pair<std::uint64_t, double>, std::pair<std::uint64_t, std::uint64_t>> acc;
  for (const auto& r : rows) {
    auto& [count, errors] = acc[{r.n, r.delta}];
    ++count;
    errors += r.error ? 1 : 0;
  }
  std::vector<ErrorRateRow> out;
  for (const auto& [key, value] : acc) {
    const auto [n, delta] = key;
    const auto [count, errors] = value;
    out.push_back({n, delta, count, errors, static_cast<double>(errors) / static_cast<double>(count),
                   fixed_error_bound(delta, gamma, static_cast<double>(n))});
  }
  return out;
}

std::vector<StoppingTimeRow> stopping_time_table(const std::vector<SequentialStudyRow>& rows) {
  std::map<std::tuple<double, double, double>, std::vector<const SequentialStudyRow*>> groups;
  for (const auto& r : rows) groups[{r.r, r.delta, r.epsilon}].push_back(&r);
  std::vector<StoppingTimeRow> out;
  for (const auto& [key, members] : groups) {
    const auto [r, delta, epsilon] = key;
    std::vector<std::uint64_t> times;
    std::uint64_t errors = 0;
    for (const auto* m : members) {
      if (m->decision != Decision::kUndecided) times.push_back(m->stopping_time);
      errors += m->error ? 1 : 0;
    }
    StoppingTimeRow row{"study", r, delta, epsilon, members.size(), times.size(), errors, NAN, NAN, 0, 0,
                        members.front()->fixed_N};
    if (!times.empty()) {
      std::sort(times.begin(), times.end());
      double sum = 0;
      for (auto t : times) sum += static_cast<double>(t);
      row.mean = sum / static_cast<double>(times.size());
      const std::size_t k = times.size();
      row.median = k % 2 ? static_cast<double>(times[k / 2])
                         : 0.5 * static_cast<double>(times[k / 2 - 1] + times[k / 2]);
      row.min = times.front();
      row.max = times.back();
    }
    out.push_back(row);
  }
  return out;
}

namespace {

struct Range {
  double lo, hi;
  std::size_t bin(double x, std::size_t bins) const {
    if (!(hi > lo)) return 0;
    const auto b = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
    return std::min(b, bins - 1);
  }
  double edge(std::size_t b, std::size_t bins) const {
    return lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  }
};

std::vector<Range> ranges_of(const SampleStore& store) {
  if (store.empty()) throw DataError("sample store is empty");
  std::vector<Range> ranges(store.dims(), {INFINITY, -INFINITY});
  for (const auto& r : store.records()) {
    for (std::size_t k = 0; k < store.dims(); ++k) {
      ranges[k].lo = std::min(ranges[k].lo, r.theta[k]);
      ranges[k].hi = std::max(ranges[k].hi, r.theta[k]);
    }
  }
  return ranges;
}

}  // namespace

std::vector<HistogramRow> parameter_histograms(const SampleStore& store, std::size_t bins) {
  if (bins == 0) throw ValidationError("histograms need at least one bin");
  const auto ranges = ranges_of(store);
  std::vector<HistogramRow> out;
  for (std::size_t k = 0; k < store.dims(); ++k) {
    std::vector<std::uint64_t> counts(bins, 0);
    for (const auto& r : store.records()) counts[ranges[k].bin(r.theta[k], bins)] += r.multiplicity;
    for (std::size_t b = 0; b < bins; ++b) {
      out.push_back({store.parameter_names()[k], b, ranges[k].edge(b, bins), ranges[k].edge(b + 1, bins), counts[b]});
    }
  }
  return out;
}

std::vector<PairRow> parameter_pairs(const SampleStore& store, std::size_t bins) {
  if (bins == 0) throw ValidationError("histograms need at least one bin");
  const auto ranges = ranges_of(store);
  const auto& names = store.parameter_names();
  std::vector<PairRow> out;
  for (std::size_t a = 0; a < store.dims(); ++a) {
    for (std::size_t b = a + 1; b < store.dims(); ++b) {
      std::vector<std::uint64_t> cells(bins * bins, 0);
      for (const auto& r : store.records()) {
        cells[ranges[a].bin(r.theta[a], bins) * bins + ranges[b].bin(r.theta[b], bins)] += r.multiplicity;
      }
      for (std::size_t i = 0; i < bins; ++i) {
        for (std::size_t j = 0; j < bins; ++j) out.push_back({names[a], names[b], i, j, cells[i * bins + j]});
      }
    }
  }
  return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

std::string num(double x) { return std::isnan(x) ? "" : fmt::format("{}", x); }

}  // namespace

std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& results,
                                                   const std::filesystem::path& out_dir, std::size_t bins) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(results)) throw DataError(fmt::format("results directory '{}' does not exist", results.string()));
  fs::create_directories(out_dir);
  std::vector<fs::path> written;

  const auto fixed_path = results / "study_fixed.csv";
  if (fs::exists(fixed_path)) {
    double gamma = NAN;
    std::ifstream meta(results / "study.json");
    if (meta) gamma = nlohmann::json::parse(meta).value("gamma", NAN);
    if (std::isnan(gamma)) throw DataError("study_fixed.csv needs study.json with the chain's gamma");
    const auto path = out_dir / "error_rates.csv";
    auto out = open_out(path);
    out << "n,delta,replicas,errors,error_rate,bound\n";
    for (const auto& r : error_rate_table(read_fixed_study(fixed_path), gamma)) {
      out << fmt::format("{},{},{},{},{},{}\n", r.n, r.delta, r.replicas, r.errors, r.error_rate, r.bound);
    }
    written.push_back(path);
  }

  std::vector<StoppingTimeRow> stopping;
  const auto seq_path = results / "study_sequential.csv";
  if (fs::exists(seq_path)) stopping = stopping_time_table(read_sequential_study(seq_path));
  std::vector<fs::path> reports;
  for (const auto& entry : fs::directory_iterator(results)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("verify_", 0) == 0 && entry.path().extension() == ".json") reports.push_back(entry.path());
  }
  std::sort(reports.begin(), reports.end());
  for (const auto& path : reports) {
    std::ifstream in(path);
    const auto j = nlohmann::json::parse(in);
    const bool decided = j.at("decision").get<std::string>() != "undecided";
    const auto n = j.at("decided_at").get<std::uint64_t>();
    StoppingTimeRow row{path.stem().string(), j.at("r").get<double>(), j.at("delta").get<double>(),
                        j.at("epsilon").get<double>(), 1, decided ? 1u : 0u, 0, NAN, NAN, 0, 0, 0};
    if (decided) {
      row.mean = row.median = static_cast<double>(n);
      row.min = row.max = n;
    }
    if (j.contains("fixed_N")) row.fixed_N = j.at("fixed_N").get<std::uint64_t>();
    stopping.push_back(row);
  }
  if (!stopping.empty()) {
    const auto path = out_dir / "stopping_times.csv";
    auto out = open_out(path);
    out << "source,r,delta,epsilon,runs,decided,errors,mean,median,min,max,fixed_N\n";
    for (const auto& r : stopping) {
      out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.source, r.r, r.delta, r.epsilon, r.runs,
                         r.decided, r.errors, num(r.mean), num(r.median), r.decided ? fmt::format("{}", r.min) : "",
                         r.decided ? fmt::format("{}", r.max) : "", r.fixed_N);
    }
    written.push_back(path);
  }

  const auto store_path = results / "samples.csv";
  if (fs::exists(store_path)) {
    const auto store = SampleStore::load(store_path);
    const auto hist_path = out_dir / "param_hist.csv";
    auto hist = open_out(hist_path);
    hist << "parameter,bin,lower,upper,count\n";
    for (const auto& r : parameter_histograms(store, bins)) {
      hist << fmt::format("{},{},{},{},{}\n", r.parameter, r.bin, r.lower, r.upper, r.count);
    }
    written.push_back(hist_path);
    const auto pair_path = out_dir / "param_pairs.csv";
    auto pairs = open_out(pair_path);
    pairs << "param_x,param_y,bin_x,bin_y,count\n";
    for (const auto& r : parameter_pairs(store, bins)) {
      pairs << fmt::format("{},{},{},{},{}\n", r.param_x, r.param_y, r.bin_x, r.bin_y, r.count);
    }
    written.push_back(pair_path);
  }

  if (written.empty()) {
    throw DataError(fmt::format("no results found in '{}' (expected study_*.csv, verify_*.json or samples.csv)",
                                results.string()));
  }
  return written;
}

}  // namespace psmc::app
