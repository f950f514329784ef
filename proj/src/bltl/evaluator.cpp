#include "psmc/bltl/evaluator.hpp"

#include <stdexcept>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc::bltl {

namespace {

using Column = std::vector<char>;

// Until over precomputed operand columns; `lhs == nullptr` means true.
Column until_column(const std::vector<double>& times, double bound, const Column* lhs,
                    const Column& rhs) {
  const std::size_t n = times.size();
  Column out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n && times[j] - times[i] <= bound; ++j) {
      if (rhs[j]) {
        out[i] = 1;
        break;
      }
      if (lhs && !(*lhs)[j]) break;
    }
  }
  return out;
}

Column globally_column(const std::vector<double>& times, double bound, const Column& operand) {
  const std::size_t n = times.size();
  Column out(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n && times[j] - times[i] <= bound; ++j) {
      if (!operand[j]) {
        out[i] = 0;
        break;
      }
    }
  }
  return out;
}

Column column(const Formula& f, const Trajectory& traj) {
  const std::size_t n = traj.size();
  const auto& times = traj.grid().times();
  switch (f.kind()) {
    case Kind::kTrue:
      return Column(n, 1);
    case Kind::kFalse:
      return Column(n, 0);
    case Kind::kAtom: {
      if (f.var() >= traj.state_dim()) {
        throw ValidationError(fmt::format("atom references state {} but the trajectory has {}",
                                          f.var(), traj.state_dim()));
      }
      Column out(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = traj.value(i, f.var());
        out[i] = f.lower() <= x && x <= f.upper();
      }
      return out;
    }
    case Kind::kNot: {
      Column out = column(f.lhs(), traj);
      for (auto& v : out) v = !v;
      return out;
    }
    case Kind::kOr:
    case Kind::kAnd: {
      Column a = column(f.lhs(), traj);
      const Column b = column(f.rhs(), traj);
      const bool is_or = f.kind() == Kind::kOr;
      for (std::size_t i = 0; i < n; ++i) a[i] = is_or ? (a[i] || b[i]) : (a[i] && b[i]);
      return a;
    }
    case Kind::kUntil: {
      const Column a = column(f.lhs(), traj);
      const Column b = column(f.rhs(), traj);
      return until_column(times, f.bound(), &a, b);
    }
    case Kind::kFinally:
      return until_column(times, f.bound(), nullptr, column(f.lhs(), traj));
    case Kind::kGlobally:
      return globally_column(times, f.bound(), column(f.lhs(), traj));
  }
  return Column(n, 0);
}

}  // namespace

std::vector<char> evaluate_all(const Formula& formula, const Trajectory& trajectory) {
  return column(formula, trajectory);
}

bool evaluate(const Formula& formula, const Trajectory& trajectory, std::size_t index) {
  if (index >= trajectory.size()) {
    throw std::out_of_range(fmt::format("evaluation index {} outside a trajectory of {} points",
                                        index, trajectory.size()));
  }
  return column(formula, trajectory)[index] != 0;
}

bool satisfies(const Formula& formula, const Trajectory& trajectory) {
  return evaluate(formula, trajectory, 0);
}

}  // namespace psmc::bltl
