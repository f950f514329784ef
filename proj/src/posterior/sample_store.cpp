#include "psmc/posterior/sample_store.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc {

SampleStore::SampleStore(std::vector<std::string> parameter_names, std::uint64_t burn_in,
                         std::uint64_t seed)
    : names_(std::move(parameter_names)), burn_in_(burn_in), seed_(seed) {}

void SampleStore::append(const ParameterVector& theta, double log_posterior) {
  if (theta.size() != names_.size()) {
    throw ValidationError(fmt::format("store holds {} parameters, got {}", names_.size(), theta.size()));
  }
  ++total_steps_;
  if (!records_.empty() && records_.back().theta == theta) {
    ++records_.back().multiplicity;
    return;
  }
  records_.push_back({theta, 1, log_posterior});
}

std::vector<double> SampleStore::expanded(std::uint64_t max_steps) const {
  const std::uint64_t n = std::min(max_steps, total_steps_);
  std::vector<double> out;
  out.reserve(n * dims());
  std::uint64_t emitted = 0;
  for (const auto& r : records_) {
    for (std::uint64_t m = 0; m < r.multiplicity && emitted < n; ++m, ++emitted) {
      out.insert(out.end(), r.theta.values().begin(), r.theta.values().end());
    }
    if (emitted == n) break;
  }
  return out;
}

std::vector<double> SampleStore::distinct() const {
  std::vector<double> out;
  out.reserve(records_.size() * dims());
  for (const auto& r : records_) out.insert(out.end(), r.theta.values().begin(), r.theta.values().end());
  return out;
}

namespace {

constexpr const char* kMagic = "# psmc sample store v1";

std::string real(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

template <typename T>
T parse_number(std::string_view s, std::size_t line) {
  T v{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw DataError(fmt::format("sample store line {}: '{}' is not a number", line, s));
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

}  // namespace

void SampleStore::write(std::ostream& out) const {
  out << kMagic << '\n';
  out << "# parameters: ";
  for (std::size_t i = 0; i < names_.size(); ++i) out << (i ? "," : "") << names_[i];
  out << '\n' << "# burn_in: " << burn_in_ << '\n' << "# seed: " << seed_ << '\n';
  out << "step_index_start";
  for (const auto& n : names_) out << ',' << n;
  out << ",multiplicity,log_posterior\n";
  std::uint64_t start = 0;
  for (const auto& r : records_) {
    out << start;
    for (double v : r.theta.values()) out << ',' << real(v);
    out << ',' << r.multiplicity << ',' << real(r.log_posterior) << '\n';
    start += r.multiplicity;
  }
}

SampleStore SampleStore::read(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kMagic) {
    throw DataError("not a sample store (missing '# psmc sample store v1' header)");
  }
  SampleStore store;
  bool have_names = false;
  bool header_row = false;
  std::uint64_t expected_start = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = line.substr(2, colon - 2);
      std::string value = line.substr(colon + 1);
      value.erase(0, value.find_first_not_of(' '));
      if (key == "parameters") {
        store.names_ = split(value, ',');
        have_names = true;
      } else if (key == "burn_in") {
        store.burn_in_ = parse_number<std::uint64_t>(value, line_no);
      } else if (key == "seed") {
        store.seed_ = parse_number<std::uint64_t>(value, line_no);
      }
      continue;
    }
    if (!have_names) throw DataError("sample store lacks a '# parameters:' line");
    const auto fields = split(line, ',');
    if (!header_row) {
      header_row = true;
      if (fields.empty() || fields[0] != "step_index_start") {
        throw DataError(fmt::format("sample store line {}: expected column header", line_no));
      }
      continue;
    }
    const std::size_t d = store.names_.size();
    if (fields.size() != d + 3) {
      throw DataError(fmt::format("sample store line {}: expected {} fields, found {}", line_no, d + 3,
                                  fields.size()));
    }
    const auto start = parse_number<std::uint64_t>(fields[0], line_no);
    if (start != expected_start) {
      throw DataError(fmt::format("sample store line {}: record starts at step {}, expected {}", line_no,
                                  start, expected_start));
    }
    std::vector<double> theta(d);
    for (std::size_t i = 0; i < d; ++i) theta[i] = parse_number<double>(fields[1 + i], line_no);
    const auto multiplicity = parse_number<std::uint64_t>(fields[d + 1], line_no);
    if (multiplicity == 0) throw DataError(fmt::format("sample store line {}: zero multiplicity", line_no));
    const double log_post = parse_number<double>(fields[d + 2], line_no);
    ParameterVector tv(std::move(theta));
    if (!store.records_.empty() && store.records_.back().theta == tv) {
      throw DataError(fmt::format("sample store line {}: repeats the previous parameter", line_no));
    }
    store.records_.push_back({std::move(tv), multiplicity, log_post});
    store.total_steps_ += multiplicity;
    expected_start += multiplicity;
  }
  if (!have_names) throw DataError("sample store lacks a '# parameters:' line");
  return store;
}

void SampleStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write sample store '{}'", path.string()));
  write(out);
}

SampleStore SampleStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open sample store '{}'", path.string()));
  try {
    return read(in);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace psmc
