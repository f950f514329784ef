#include "psmc/bltl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <vector>

#include "psmc/error.hpp"

namespace psmc::bltl {

namespace {

enum class Tok { kLBracket, kRBracket, kLParen, kRParen, kLe, kNot, kAnd, kOr, kArrow, kNumber, kIdent, kEnd };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::kEnd: return "end of input";
    case Tok::kNumber:
    case Tok::kIdent: return "'" + std::string(t.text) + "'";
    default: return "'" + std::string(t.text) + "'";
  }
}

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> names) : text_(text), names_(names) {
    lex();
  }

  Formula run() {
    if (tokens_.front().kind == Tok::kEnd) fail(tokens_.front(), "empty formula");
    Formula f = implication();
    if (peek().kind != Tok::kEnd) fail(peek(), "unexpected " + describe(peek()));
    return f;
  }

 private:
  [[noreturn]] void fail_at(std::size_t offset, const std::string& message) const {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(message, line, column);
  }

  [[noreturn]] void fail(const Token& t, const std::string& message) const {
    fail_at(t.offset, message);
  }

  void lex() {
    std::size_t i = 0;
    auto push = [&](Tok kind, std::size_t len) {
      tokens_.push_back({kind, i, text_.substr(i, len)});
      i += len;
    };
    while (i < text_.size()) {
      const char c = text_[i];
      const char next = i + 1 < text_.size() ? text_[i + 1] : '\0';
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '[') {
        push(Tok::kLBracket, 1);
      } else if (c == ']') {
        push(Tok::kRBracket, 1);
      } else if (c == '(') {
        push(Tok::kLParen, 1);
      } else if (c == ')') {
        push(Tok::kRParen, 1);
      } else if (c == '<' && next == '=') {
        push(Tok::kLe, 2);
      } else if (c == '!') {
        push(Tok::kNot, 1);
      } else if (c == '&') {
        push(Tok::kAnd, 1);
      } else if (c == '|') {
        push(Tok::kOr, 1);
      } else if (c == '-' && next == '>') {
        push(Tok::kArrow, 2);
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
                 ((c == '-' || c == '+') &&
                  (std::isdigit(static_cast<unsigned char>(next)) || next == '.'))) {
        const char* begin = text_.data() + i + (c == '+' ? 1 : 0);
        double value = 0.0;
        auto [end, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
        if (ec != std::errc()) fail_at(i, "malformed number");
        const std::size_t len = static_cast<std::size_t>(end - (text_.data() + i));
        tokens_.push_back({Tok::kNumber, i, text_.substr(i, len), value});
        i += len;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t len = 1;
        while (i + len < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[i + len])) || text_[i + len] == '_')) {
          ++len;
        }
        push(Tok::kIdent, len);
      } else {
        fail_at(i, std::string("unexpected character '") + c + "'");
      }
    }
    tokens_.push_back({Tok::kEnd, text_.size(), {}});
  }

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& take() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    return take();
  }

  bool is_temporal(std::string_view keyword) const {
    return peek().kind == Tok::kIdent && peek().text == keyword && peek(1).kind == Tok::kLe;
  }

  double bound() {
    expect(Tok::kLe, "'<='");
    const Token& t = expect(Tok::kNumber, "time bound");
    if (t.number < 0.0) fail(t, "time bound must be >= 0");
    return t.number;
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::kArrow) {
      take();
      Formula rhs = implication();
      return Formula::disjunction(Formula::negation(lhs), rhs);
    }
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (peek().kind == Tok::kOr) {
      take();
      f = Formula::disjunction(f, conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = until();
    while (peek().kind == Tok::kAnd) {
      take();
      f = Formula::conjunction(f, until());
    }
    return f;
  }

  Formula until() {
    Formula lhs = unary();
    if (is_temporal("U")) {
      take();
      const double b = bound();
      Formula rhs = until();
      return Formula::until(b, lhs, rhs);
    }
    return lhs;
  }

  Formula unary() {
    if (peek().kind == Tok::kNot) {
      take();
      return Formula::negation(unary());
    }
    if (is_temporal("F")) {
      take();
      const double b = bound();
      return Formula::eventually(b, unary());
    }
    if (is_temporal("G")) {
      take();
      const double b = bound();
      return Formula::always(b, unary());
    }
    return primary();
  }

  Formula primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kLParen: {
        take();
        Formula f = implication();
        expect(Tok::kRParen, "')'");
        return f;
      }
      case Tok::kLBracket:
        return atom();
      case Tok::kIdent:
        if (t.text == "true") {
          take();
          return Formula::truth();
        }
        if (t.text == "false") {
          take();
          return Formula::falsity();
        }
        fail(t, "unexpected identifier '" + std::string(t.text) + "' (atoms are written [L <= name <= U])");
      case Tok::kEnd:
        fail(t, "unexpected end of input");
      default:
        fail(t, "unexpected " + describe(t));
    }
  }

  Formula atom() {
    const Token& open = take();
    const double lower = expect(Tok::kNumber, "lower bound").number;
    expect(Tok::kLe, "'<='");
    const Token& name = expect(Tok::kIdent, "state name");
    auto it = std::find(names_.begin(), names_.end(), name.text);
    if (it == names_.end()) fail(name, "unknown state '" + std::string(name.text) + "'");
    expect(Tok::kLe, "'<='");
    const double upper = expect(Tok::kNumber, "upper bound").number;
    expect(Tok::kRBracket, "']'");
    if (lower > upper) fail(open, "atom lower bound exceeds upper bound");
    return Formula::atom(static_cast<std::size_t>(it - names_.begin()), lower, upper);
  }

  std::string_view text_;
  std::span<const std::string> names_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text, std::span<const std::string> state_names) {
  return Parser(text, state_names).run();
}

}  // namespace psmc::bltl
