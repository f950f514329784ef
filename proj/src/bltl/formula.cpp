#include "psmc/bltl/formula.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "psmc/error.hpp"

namespace psmc::bltl {

Formula Formula::make(Node node) { return Formula(std::make_shared<const Node>(std::move(node))); }

Formula Formula::truth() {
  static const Formula t = make({Kind::kTrue});
  return t;
}

Formula Formula::falsity() {
  static const Formula f = make({Kind::kFalse});
  return f;
}

Formula Formula::atom(std::size_t var, double lower, double upper) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw ValidationError(fmt::format("atom bounds must satisfy L <= U (got [{}, {}])", lower, upper));
  }
  Node n{Kind::kAtom};
  n.var = var;
  n.lower = lower;
  n.upper = upper;
  return make(std::move(n));
}

Formula Formula::negation(Formula operand) {
  Node n{Kind::kNot};
  n.lhs = std::move(operand.node_);
  return make(std::move(n));
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
  Node n{Kind::kOr};
  n.lhs = std::move(lhs.node_);
  n.rhs = std::move(rhs.node_);
  return make(std::move(n));
}

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  Node n{Kind::kAnd};
  n.lhs = std::move(lhs.node_);
  n.rhs = std::move(rhs.node_);
  return make(std::move(n));
}

namespace {

void check_bound(double bound) {
  if (!std::isfinite(bound) || bound < 0.0) {
    throw ValidationError(fmt::format("temporal bound must be finite and >= 0 (got {})", bound));
  }
}

}  // namespace

Formula Formula::until(double bound, Formula lhs, Formula rhs) {
  check_bound(bound);
  Node n{Kind::kUntil};
  n.bound = bound;
  n.lhs = std::move(lhs.node_);
  n.rhs = std::move(rhs.node_);
  return make(std::move(n));
}

Formula Formula::eventually(double bound, Formula operand) {
  check_bound(bound);
  Node n{Kind::kFinally};
  n.bound = bound;
  n.lhs = std::move(operand.node_);
  return make(std::move(n));
}

Formula Formula::always(double bound, Formula operand) {
  check_bound(bound);
  Node n{Kind::kGlobally};
  n.bound = bound;
  n.lhs = std::move(operand.node_);
  return make(std::move(n));
}

std::size_t Formula::size() const {
  std::size_t n = 1;
  if (node_->lhs) n += lhs().size();
  if (node_->rhs) n += rhs().size();
  return n;
}

std::size_t Formula::depth() const {
  std::size_t d = 0;
  if (node_->lhs) d = std::max(d, lhs().depth());
  if (node_->rhs) d = std::max(d, rhs().depth());
  return d + 1;
}

std::size_t Formula::var_count() const {
  std::size_t n = kind() == Kind::kAtom ? var() + 1 : 0;
  if (node_->lhs) n = std::max(n, lhs().var_count());
  if (node_->rhs) n = std::max(n, rhs().var_count());
  return n;
}

Formula Formula::normalized() const {
  switch (kind()) {
    case Kind::kTrue:
    case Kind::kFalse:
    case Kind::kAtom:
      return *this;
    case Kind::kNot:
      return negation(lhs().normalized());
    case Kind::kOr:
      return disjunction(lhs().normalized(), rhs().normalized());
    case Kind::kAnd:
      return negation(disjunction(negation(lhs().normalized()), negation(rhs().normalized())));
    case Kind::kUntil:
      return until(bound(), lhs().normalized(), rhs().normalized());
    case Kind::kFinally:
      return until(bound(), truth(), lhs().normalized());
    case Kind::kGlobally:
      return negation(until(bound(), truth(), negation(lhs().normalized())));
  }
  return *this;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::kTrue:
    case Kind::kFalse:
      return true;
    case Kind::kAtom:
      return a.var() == b.var() && a.lower() == b.lower() && a.upper() == b.upper();
    case Kind::kNot:
      return a.lhs() == b.lhs();
    case Kind::kOr:
    case Kind::kAnd:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    case Kind::kUntil:
      return a.bound() == b.bound() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
    case Kind::kFinally:
    case Kind::kGlobally:
      return a.bound() == b.bound() && a.lhs() == b.lhs();
  }
  return false;
}

namespace {

std::string number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

bool is_leaf(const Formula& f) {
  return f.kind() == Kind::kTrue || f.kind() == Kind::kFalse || f.kind() == Kind::kAtom;
}

std::string print(const Formula& f, std::span<const std::string> names);

std::string wrapped(const Formula& f, std::span<const std::string> names) {
  return is_leaf(f) ? print(f, names) : "(" + print(f, names) + ")";
}

std::string print(const Formula& f, std::span<const std::string> names) {
  switch (f.kind()) {
    case Kind::kTrue:
      return "true";
    case Kind::kFalse:
      return "false";
    case Kind::kAtom: {
      if (f.var() >= names.size()) {
        throw ValidationError(fmt::format("atom references state {} but only {} names given",
                                          f.var(), names.size()));
      }
      return "[" + number(f.lower()) + " <= " + names[f.var()] + " <= " + number(f.upper()) + "]";
    }
    case Kind::kNot:
      return "!" + wrapped(f.lhs(), names);
    case Kind::kOr:
      return wrapped(f.lhs(), names) + " | " + wrapped(f.rhs(), names);
    case Kind::kAnd:
      return wrapped(f.lhs(), names) + " & " + wrapped(f.rhs(), names);
    case Kind::kUntil:
      return wrapped(f.lhs(), names) + " U<=" + number(f.bound()) + " " + wrapped(f.rhs(), names);
    case Kind::kFinally:
      return "F<=" + number(f.bound()) + " (" + print(f.lhs(), names) + ")";
    case Kind::kGlobally:
      return "G<=" + number(f.bound()) + " (" + print(f.lhs(), names) + ")";
  }
  return {};
}

}  // namespace

std::string to_string(const Formula& formula, std::span<const std::string> state_names) {
  return print(formula, state_names);
}

}  // namespace psmc::bltl
