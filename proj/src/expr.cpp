#include "okflow/expr.hpp"

#include "okflow/errors.hpp"

#include <cctype>
#include <optional>

namespace okflow {

namespace {

// Little recursive-descent parser. Polynomials only, so every node is an
// exact TruncSeries and arithmetic stays exact.
class Parser {
public:
  Parser(const std::string& text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

  TruncSeries parse() {
    TruncSeries e = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

private:
  const std::string& text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw input_error("parse_polynomial: " + what + " at offset " + std::to_string(pos_) + " in '" + text_ + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::optional<char> peek() {
    skip_ws();
    if (pos_ >= text_.size()) return std::nullopt;
    return text_[pos_];
  }

  TruncSeries expression() {
    bool neg = false;
    skip_ws();
    if (consume('-'))
      neg = true;
    else
      consume('+');
    TruncSeries acc = term();
    if (neg) acc = series_scale(acc, Rat(-1));
    while (auto c = peek()) {
      if (*c == '+') {
        ++pos_;
        acc = series_add(acc, term());
      } else if (*c == '-') {
        ++pos_;
        acc = series_sub(acc, term());
      } else {
        break;
      }
    }
    return acc;
  }

  TruncSeries term() {
    TruncSeries acc = factor();
    while (auto c = peek()) {
      if (*c == '*') {
        ++pos_;
        acc = series_mul(acc, factor());
      } else if (*c == '/') {
        ++pos_;
        Int d = integer();
        if (d == 0) fail("division by zero");
        acc = series_scale(acc, Rat(Int(1), d));
      } else if (std::isalpha(static_cast<unsigned char>(*c)) || *c == '(') {
        acc = series_mul(acc, factor()); // juxtaposition, e.g. "2x"
      } else {
        break;
      }
    }
    return acc;
  }

  TruncSeries factor() {
    TruncSeries base = atom();
    if (consume('^')) {
      Int e = integer();
      if (e < 0) fail("negative exponent");
      TruncSeries acc = TruncSeries::constant(vars_.size(), Rat(1), 0, true);
      for (Int i = 0; i < e; ++i) acc = series_mul(acc, base);
      return acc;
    }
    return base;
  }

  TruncSeries atom() {
    auto c = peek();
    if (!c) fail("unexpected end of input");
    if (*c == '(') {
      ++pos_;
      TruncSeries e = expression();
      if (!consume(')')) fail("missing ')'");
      return e;
    }
    if (*c == '-') {
      ++pos_;
      return series_scale(atom(), Rat(-1));
    }
    if (std::isdigit(static_cast<unsigned char>(*c))) return TruncSeries::constant(vars_.size(), Rat(integer()), 0, true);
    if (std::isalpha(static_cast<unsigned char>(*c)) || *c == '_') {
      std::string name = identifier();
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) {
          LatticeVector e(vars_.size(), 0);
          e[i] = 1;
          return TruncSeries::monomial(vars_.size(), e, Rat(1), 1, true);
        }
      fail("unknown variable '" + name + "'");
    }
    fail(std::string("unexpected character '") + *c + "'");
  }

  Int integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected integer");
    return Int(text_.substr(start, pos_ - start));
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return text_.substr(start, pos_ - start);
  }
};

} // namespace

TruncSeries parse_polynomial(const std::string& text, const std::vector<std::string>& variables) {
  return Parser(text, variables).parse();
}

} // namespace okflow
