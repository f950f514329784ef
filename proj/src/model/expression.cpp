#include "psmc/model/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "psmc/error.hpp"

namespace psmc {

// Grammar:
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | '+' unary | power
//   power   := atom ('^' unary)?
//   atom    := number | identifier | '(' sum ')'
class ExpressionCompiler {
 public:
  ExpressionCompiler(std::string_view text, const SymbolTable& symbols)
      : text_(text), symbols_(symbols) {}

  Expression run() {
    Expression expr;
    expr.source_ = std::string(text_);
    skip_space();
    if (at_end()) fail("empty expression");
    sum(expr.code_);
    skip_space();
    if (!at_end()) fail(std::string("unexpected character '") + text_[pos_] + "'");
    check_depth(expr.code_);
    return expr;
  }

 private:
  using Code = std::vector<Expression::Instr>;
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message + " in expression '" + std::string(text_) + "'", 1, pos_ + 1);
  }

  bool at_end() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void sum(Code& code) {
    product(code);
    while (true) {
      if (accept('+')) {
        product(code);
        code.push_back({Op::kAdd});
      } else if (accept('-')) {
        product(code);
        code.push_back({Op::kSub});
      } else {
        return;
      }
    }
  }

  void product(Code& code) {
    unary(code);
    while (true) {
      if (accept('*')) {
        unary(code);
        code.push_back({Op::kMul});
      } else if (accept('/')) {
        unary(code);
        code.push_back({Op::kDiv});
      } else {
        return;
      }
    }
  }

  void unary(Code& code) {
    if (accept('-')) {
      unary(code);
      code.push_back({Op::kNeg});
    } else if (accept('+')) {
      unary(code);
    } else {
      power(code);
    }
  }

  void power(Code& code) {
    atom(code);
    if (accept('^')) {
      Code exponent;
      unary(exponent);
      // x^k with a small literal integer k becomes repeated multiplication
      if (exponent.size() == 1 && exponent[0].op == Op::kConst) {
        const double k = exponent[0].value;
        if (k == std::floor(k) && std::abs(k) <= 16) {
          code.push_back({Op::kIntPow, static_cast<std::int32_t>(k)});
          return;
        }
      }
      code.insert(code.end(), exponent.begin(), exponent.end());
      code.push_back({Op::kPow});
    }
  }

  void atom(Code& code) {
    skip_space();
    if (at_end()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      sum(code);
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      auto [end, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
      if (ec != std::errc()) fail("malformed number");
      pos_ = static_cast<std::size_t>(end - text_.data());
      code.push_back({Op::kConst, 0, value});
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                           text_[pos_] == '_')) {
        ++pos_;
      }
      code.push_back(resolve(text_.substr(start, pos_ - start), start));
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expression::Instr resolve(std::string_view name, std::size_t start) {
    auto find = [&](const std::vector<std::string>& names) -> std::int32_t {
      auto it = std::find(names.begin(), names.end(), name);
      return it == names.end() ? -1 : static_cast<std::int32_t>(it - names.begin());
    };
    if (auto i = find(symbols_.states); i >= 0) return {Op::kState, i};
    if (auto i = find(symbols_.parameters); i >= 0) return {Op::kParam, i};
    if (auto i = find(symbols_.inputs); i >= 0) return {Op::kInput, i};
    if (name == "t") return {Op::kTime};
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  void check_depth(const Code& code) const {
    std::size_t depth = 0;
    std::size_t max_depth = 0;
    for (const auto& instr : code) {
      switch (instr.op) {
        case Op::kConst:
        case Op::kState:
        case Op::kParam:
        case Op::kInput:
        case Op::kTime:
          max_depth = std::max(max_depth, ++depth);
          break;
        case Op::kNeg:
        case Op::kIntPow:
          break;
        default:
          --depth;
      }
    }
    if (max_depth > Expression::kMaxStackDepth) {
      throw ParseError("expression nests too deeply", 1, 1);
    }
  }

  std::string_view text_;
  const SymbolTable& symbols_;
  std::size_t pos_ = 0;
};

Expression Expression::compile(std::string_view text, const SymbolTable& symbols) {
  return ExpressionCompiler(text, symbols).run();
}

namespace {

double int_pow(double x, int k) {
  const bool invert = k < 0;
  unsigned n = static_cast<unsigned>(invert ? -k : k);
  double result = 1.0;
  while (n) {
    if (n & 1u) result *= x;
    x *= x;
    n >>= 1u;
  }
  return invert ? 1.0 / result : result;
}

}  // namespace

double Expression::evaluate(const ExpressionContext& ctx) const {
  std::array<double, kMaxStackDepth> stack;
  std::size_t top = 0;
  for (const auto& instr : code_) {
    switch (instr.op) {
      case Op::kConst: stack[top++] = instr.value; break;
      case Op::kState: stack[top++] = ctx.state[instr.index]; break;
      case Op::kParam: stack[top++] = ctx.parameters[instr.index]; break;
      case Op::kInput: stack[top++] = ctx.inputs[instr.index]; break;
      case Op::kTime: stack[top++] = ctx.time; break;
      case Op::kAdd: --top; stack[top - 1] += stack[top]; break;
      case Op::kSub: --top; stack[top - 1] -= stack[top]; break;
      case Op::kMul: --top; stack[top - 1] *= stack[top]; break;
      case Op::kDiv: --top; stack[top - 1] /= stack[top]; break;
      case Op::kPow: --top; stack[top - 1] = std::pow(stack[top - 1], stack[top]); break;
      case Op::kIntPow: stack[top - 1] = int_pow(stack[top - 1], instr.index); break;
      case Op::kNeg: stack[top - 1] = -stack[top - 1]; break;
    }
  }
  return stack[0];
}

}  // namespace psmc
