#include "l1adapt/cli/tf_expression.hpp"

#include <cctype>
#include <cstdlib>

#include "l1adapt/error.hpp"

namespace l1adapt::cli {
namespace {

struct Rational {
  Polynomial num{1.0};
  Polynomial den{1.0};
};

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den == b.den) return {a.num + b.num, a.den};
  return {a.num * b.den + b.num * a.den, a.den * b.den};
}
Rational operator-(const Rational& a) { return {-a.num, a.den}; }
Rational operator*(const Rational& a, const Rational& b) { return {a.num * b.num, a.den * b.den}; }

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Rational parse() {
    Rational value = expression();
    skip_space();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return value;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::kParse, "transfer function \"" + text_ + "\", column " +
                                std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool starts_factor(char c) const {
    return c == '(' || c == 's' || c == '.' || std::isdigit(static_cast<unsigned char>(c));
  }

  Rational expression() {
    Rational value = term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      const Rational rhs = term();
      value = c == '+' ? value + rhs : value + (-rhs);
    }
    return value;
  }

  Rational term() {
    Rational value = unary();
    for (char c = peek();; c = peek()) {
      if (c == '*') {
        ++pos_;
        value = value * unary();
      } else if (c == '/') {
        ++pos_;
        const Rational rhs = unary();
        if (rhs.num.is_zero()) error("division by zero");
        value = value * Rational{rhs.den, rhs.num};
      } else if (starts_factor(c)) {
        value = value * power();
      } else {
        return value;
      }
    }
  }

  Rational unary() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return -unary();
    }
    if (c == '+') {
      ++pos_;
      return unary();
    }
    return power();
  }

  Rational power() {
    Rational base = primary();
    if (peek() != '^') return base;
    ++pos_;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) error("expected a nonnegative integer exponent");
    const int k = std::stoi(text_.substr(start, pos_ - start));
    return {base.num.pow(k), base.den.pow(k)};
  }

  Rational primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Rational inner = expression();
      if (peek() != ')') error("expected ')'");
      ++pos_;
      return inner;
    }
    if (c == 's') {
      ++pos_;
      return {Polynomial::s(), Polynomial{1.0}};
    }
    if (c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) error("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return {Polynomial{v}, Polynomial{1.0}};
    }
    error(c == '\0' ? "unexpected end of expression" : "unexpected '" + std::string(1, c) + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

TransferFunction parse_tf_expression(const std::string& text) {
  Rational r = Parser(text).parse();
  require(!r.den.is_zero(), ErrorKind::kParse, "transfer function \"" + text + "\": zero denominator");
  if (r.den.leading() < 0.0) {
    r.num *= -1.0;
    r.den *= -1.0;
  }
  return {r.num, r.den};
}

}  // namespace l1adapt::cli
