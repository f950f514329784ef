#include "psmc/app/study.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "psmc/error.hpp"
#include "psmc/smc/sample_size.hpp"
#include "psmc/smc/synthetic.hpp"

namespace psmc::app {

bool is_error(Decision decision, double p, double r, double delta) {
  if (decision == Decision::kUndecided) return false;
  if (p >= r + delta) return decision == Decision::kH1;
  if (p <= r - delta) return decision == Decision::kH0;
  return false;
}

std::vector<FixedStudyRow> run_fixed_study(const FixedStudyConfig& c) {
  if (c.ns.empty() || c.deltas.empty()) throw ValidationError("study needs at least one n and one delta");
  auto ns = c.ns;
  std::sort(ns.begin(), ns.end());
  for (double d : c.deltas) HypothesisSpec{c.p - d, d, 0.5}.validate();

  const std::size_t per_replica = ns.size() * c.deltas.size();
  std::vector<FixedStudyRow> rows(c.replicas * per_replica);
  parallel_for(c.replicas, c.jobs, [&](std::size_t rep) {
    TwoStateChain chain(c.p, c.gamma, c.seed, rep);
    std::uint64_t n = 0;
    std::uint64_t s = 0;
    std::size_t out = rep * per_replica;
    for (std::uint64_t target : ns) {
      while (n < target) {
        s += chain.next() ? 1 : 0;
        ++n;
      }
      for (double delta : c.deltas) {
        const double r = c.p - delta;
        const bool h0 = static_cast<double>(s) >= static_cast<double>(n) * r;
        const Decision d = h0 ? Decision::kH0 : Decision::kH1;
        rows[out++] = {rep, delta, r, n, s, d, is_error(d, c.p, r, delta)};
      }
    }
  });
  return rows;
}

std::vector<SequentialStudyRow> run_sequential_study(const SequentialStudyConfig& c) {
  struct Setting {
    double r, delta, epsilon;
  };
  std::vector<Setting> settings;
  for (double r : c.rs) {
    for (double d : c.deltas) {
      for (double e : c.epsilons) settings.push_back({r, d, e});
    }
  }
  if (settings.empty()) throw ValidationError("study needs at least one (r, delta, epsilon)");
  std::vector<SequentialStudyRow> rows(settings.size() * c.replicas);
  std::vector<SequentialTestPlan> plans;
  std::vector<std::uint64_t> fixed;
  for (const auto& s : settings) {
    const HypothesisSpec spec{s.r, s.delta, s.epsilon};
    plans.push_back(plan_sequential_test(spec, c.gamma, c.max_samples, c.batch_size));
    fixed.push_back(fixed_sample_size(s.epsilon, s.delta, c.gamma));
  }
  parallel_for(rows.size(), c.jobs, [&](std::size_t i) {
    const std::size_t k = i / c.replicas;
    const std::uint64_t rep = i % c.replicas;
    const auto& s = settings[k];
    TwoStateChain chain(c.p, c.gamma, c.seed, rep);
    GeneratorSource source([&] { return chain.next(); });
    const auto out = sequential_test({s.r, s.delta, s.epsilon}, plans[k], source);
    rows[i] = {rep,        s.r,          s.delta,       s.epsilon,   plans[k].M,
               fixed[k],   out.decided_at, out.successes, out.decision, is_error(out.decision, c.p, s.r, s.delta)};
  });
  return rows;
}

namespace {

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != columns) {
      throw DataError(fmt::format("{}:{}: expected {} columns, got {}", path.string(), line_no, columns, fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

Decision decision_from(const std::string& s) {
  if (s == "H0") return Decision::kH0;
  if (s == "H1") return Decision::kH1;
  return Decision::kUndecided;
}

}  // namespace

void write_fixed_study(const std::vector<FixedStudyRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << "replica,delta,r,n,successes,decision,error\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{}\n", r.replica, r.delta, r.r, r.n, r.successes, to_string(r.decision),
                       r.error ? 1 : 0);
  }
}

void write_sequential_study(const std::vector<SequentialStudyRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << "replica,r,delta,epsilon,M,fixed_N,stopping_time,successes,decision,error\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.replica, r.r, r.delta, r.epsilon, r.M, r.fixed_N,
                       r.stopping_time, r.successes, to_string(r.decision), r.error ? 1 : 0);
  }
}

std::vector<FixedStudyRow> read_fixed_study(const std::filesystem::path& path) {
  std::vector<FixedStudyRow> rows;
  for (const auto& f : read_csv(path, 7)) {
    rows.push_back({std::stoull(f[0]), std::stod(f[1]), std::stod(f[2]), std::stoull(f[3]), std::stoull(f[4]),
                    decision_from(f[5]), f[6] == "1"});
  }
  return rows;
}

std::vector<SequentialStudyRow> read_sequential_study(const std::filesystem::path& path) {
  std::vector<SequentialStudyRow> rows;
  for (const auto& f : read_csv(path, 10)) {
    rows.push_back({std::stoull(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4]),
                    std::stoull(f[5]), std::stoull(f[6]), std::stoull(f[7]), decision_from(f[8]), f[9] == "1"});
  }
  return rows;
}

}  // namespace psmc::app
