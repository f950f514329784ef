#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>

namespace psmc::bltl {

enum class Kind { kTrue, kFalse, kAtom, kNot, kOr, kAnd, kUntil, kFinally, kGlobally };

/// Immutable BLTL formula. Copies share structure; safe to use across threads.
///
/// Temporal bounds are absolute time (minutes), not index offsets. Atoms
/// refer to state variables by index.
class Formula {
 public:
  static Formula truth();
  static Formula falsity();
  /// Throws ValidationError if lower > upper.
  static Formula atom(std::size_t var, double lower, double upper);
  static Formula negation(Formula operand);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula conjunction(Formula lhs, Formula rhs);
  /// Throws ValidationError for a negative or non-finite bound.
  static Formula until(double bound, Formula lhs, Formula rhs);
  static Formula eventually(double bound, Formula operand);
  static Formula always(double bound, Formula operand);

  Kind kind() const { return node_->kind; }

  // Atom fields.
  std::size_t var() const { return node_->var; }
  double lower() const { return node_->lower; }
  double upper() const { return node_->upper; }

  // Temporal bound (Until, Finally, Globally).
  double bound() const { return node_->bound; }

  /// Sole child of Not/Finally/Globally, left child of Or/And/Until.
  Formula lhs() const { return Formula(node_->lhs); }
  Formula rhs() const { return Formula(node_->rhs); }

  /// Number of nodes.
  std::size_t size() const;
  std::size_t depth() const;
  /// Largest atom variable index plus one (0 if there are no atoms).
  std::size_t var_count() const;

  /// Rewrites And, Finally and Globally into Not, Or and Until.
  Formula normalized() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Kind kind;
    std::size_t var = 0;
    double lower = 0.0;
    double upper = 0.0;
    double bound = 0.0;
    std::shared_ptr<const Node> lhs = nullptr;
    std::shared_ptr<const Node> rhs = nullptr;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(Node node);

  std::shared_ptr<const Node> node_;
};

/// Canonical text that parse() maps back to an equal formula.
std::string to_string(const Formula& formula, std::span<const std::string> state_names);

}  // namespace psmc::bltl
