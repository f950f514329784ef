#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace psmc {

/// Identifiers an expression may reference. The reserved name `t` denotes
/// the current time in minutes.
struct SymbolTable {
  std::vector<std::string> states;
  std::vector<std::string> parameters;
  std::vector<std::string> inputs;
};

struct ExpressionContext {
  std::span<const double> state;
  std::span<const double> parameters;
  std::span<const double> inputs;
  double time = 0.0;
};

/// An arithmetic expression (+ - * / ^, unary minus, parentheses, numeric
/// literals and identifiers) compiled to a small stack program.
///
/// Compilation resolves every identifier against a SymbolTable, so evaluation
/// never fails; it is const and safe to call concurrently.
class Expression {
 public:
  static Expression compile(std::string_view text, const SymbolTable& symbols);

  double evaluate(const ExpressionContext& ctx) const;

  const std::string& source() const { return source_; }

  static constexpr std::size_t kMaxStackDepth = 64;

 private:
  enum class Op : std::uint8_t {
    kConst,
    kState,
    kParam,
    kInput,
    kTime,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kPow,
    kIntPow,
    kNeg
  };
  struct Instr {
    Op op;
    std::int32_t index = 0;
    double value = 0.0;
  };

  friend class ExpressionCompiler;

  std::string source_;
  std::vector<Instr> code_;
};

}  // namespace psmc
