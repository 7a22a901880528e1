#pragma once

#include <cctype>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "subcurv/calculus/errors.hpp"
#include "subcurv/calculus/expr.hpp"

namespace subcurv {

/// Ordered, uniquely named coordinates of a chart.
class CoordSystem {
 public:
  CoordSystem() = default;
  explicit CoordSystem(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() < 2) throw std::invalid_argument("a chart needs at least two coordinates");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
      if (n.empty() || !(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_')) {
        throw std::invalid_argument("invalid coordinate name '" + n + "'");
      }
      if (!seen.insert(n).second) throw std::invalid_argument("duplicate coordinate name '" + n + "'");
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> index_of(std::string_view n) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == n) return i;
    }
    return std::nullopt;
  }
  friend bool operator==(const CoordSystem&, const CoordSystem&) = default;

 private:
  std::vector<std::string> names_;
};

/// Named subexpressions (for example r2 or rho) usable inside sources.
using Definitions = std::map<std::string, Expr, std::less<>>;

namespace detail {

class Parser {
 public:
  Parser(std::string_view src, const CoordSystem& coords, const Definitions& defs)
      : src_(src), coords_(coords), defs_(defs) {}

  Expr run() {
    skip();
    if (pos_ == src_.size()) fail("empty expression");
    Expr e = expression();
    skip();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  // expression := term { ('+'|'-') term }
  Expr expression() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (eat('+')) {
        terms.push_back(term());
      } else if (eat('-')) {
        terms.push_back(-term());
      } else {
        return Expr::sum(std::move(terms));
      }
    }
  }

  // term := unary { ('*'|'/') unary }
  Expr term() {
    Expr acc = unary();
    for (;;) {
      if (eat('*')) {
        acc = acc * unary();
      } else if (eat('/')) {
        acc = acc / unary();
      } else {
        return acc;
      }
    }
  }

  // unary := '-' unary | power
  Expr unary() {
    if (eat('-')) return -unary();
    return power();
  }

  // power := primary [ '^' unary ]
  Expr power() {
    Expr base = primary();
    if (!eat('^')) return base;
    std::size_t at = pos_;
    Expr ex = unary();
    if (!ex.is_constant() || !ex.value().is_exact()) {
      pos_ = at;
      fail("non-rational exponent");
    }
    return Expr::power(base, ex.value().rational());
  }

  Expr primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    std::string_view id = src_.substr(start, pos_ - start);
    if (id == "sqrt") {
      if (!eat('(')) fail("expected '(' after sqrt");
      Expr e = expression();
      if (!eat(')')) fail("expected ')'");
      return subcurv::sqrt(e);
    }
    if (auto i = coords_.index_of(id)) return Expr::variable(*i);
    if (auto it = defs_.find(id); it != defs_.end()) return it->second;
    pos_ = start;
    fail("unknown identifier '" + std::string(id) + "'");
  }

  // digits [ '.' digits ] [ ('e'|'E') ['+'|'-'] digits ], folded exactly
  Expr number() {
    std::size_t start = pos_;
    __int128 mant = 0;
    std::int64_t scale = 0;
    bool any = false;
    auto digits = [&](bool fractional) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        mant = mant * 10 + (src_[pos_] - '0');
        if (mant > static_cast<__int128>(INT64_MAX)) {
          pos_ = start;
          fail("numeric literal out of range");
        }
        if (fractional) --scale;
        any = true;
        ++pos_;
      }
    };
    digits(false);
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits(true);
    }
    if (!any) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      int sign = 1;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        sign = src_[pos_] == '-' ? -1 : 1;
        ++pos_;
      }
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        pos_ = save;
        fail("malformed exponent in number");
      }
      std::int64_t ex = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ex = std::min<std::int64_t>(ex * 10 + (src_[pos_] - '0'), 10000);
        ++pos_;
      }
      scale += sign * ex;
    }
    auto m = Rational{static_cast<std::int64_t>(mant)};
    auto p = checked_pow(Rational{10}, scale);
    if (p) {
      if (auto r = checked_mul(m, *p)) return constant(*r);
    }
    return Expr::constant(Number::inexact(std::stod(std::string(src_.substr(start, pos_ - start)))));
  }

  std::string_view src_;
  const CoordSystem& coords_;
  const Definitions& defs_;
  std::size_t pos_ = 0;
};

inline std::string format_number(const Number& n) {
  if (n.is_exact()) return n.rational().to_string();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", n.value());
  std::string s = buf;
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

enum class Prec { sum = 0, product = 1, unary = 2, power = 3, atom = 4 };

class Printer {
 public:
  explicit Printer(const CoordSystem& coords) : coords_(coords) {}

  std::string print(const Expr& e, Prec ctx) const {
    std::string s = body(e);
    return precedence(e) < ctx ? "(" + s + ")" : s;
  }

 private:
  static Prec precedence(const Expr& e) {
    switch (e.kind()) {
      case Kind::constant: {
        const Number& v = e.value();
        if (v.is_negative()) return Prec::unary;
        if (v.is_exact() && !v.rational().is_integer()) return Prec::product;
        return Prec::atom;
      }
      case Kind::variable:
        return Prec::atom;
      case Kind::power:
        return Prec::power;
      case Kind::negation:
        return Prec::unary;
      case Kind::product:
        return e.children().front().is_constant() && e.children().front().value().is_negative()
                   ? Prec::unary
                   : Prec::product;
      case Kind::sum:
        return Prec::sum;
    }
    return Prec::atom;
  }

  std::string body(const Expr& e) const {
    switch (e.kind()) {
      case Kind::constant:
        return format_number(e.value());
      case Kind::variable:
        if (e.index() >= coords_.size()) {
          throw DimensionMismatch("variable index " + std::to_string(e.index()) +
                                  " outside the coordinate system");
        }
        return coords_.name(e.index());
      case Kind::negation:
        return "-" + print(e.children().front(), Prec::power);
      case Kind::power: {
        const Rational& x = e.exponent();
        std::string ex = x.is_integer() && x.num() >= 0 ? x.to_string() : "(" + x.to_string() + ")";
        return print(e.base(), Prec::atom) + "^" + ex;
      }
      case Kind::product:
        return product_body(e);
      case Kind::sum: {
        std::string out;
        bool first = true;
        for (const auto& t : e.children()) {
          auto [negative, magnitude] = split_sign(t);
          if (first) {
            out = negative ? "-" + print(magnitude, Prec::power) : print(t, Prec::product);
            if (negative && magnitude.kind() == Kind::product) out = "-" + product_body(magnitude);
          } else if (negative) {
            out += " - " + print(magnitude, Prec::product);
          } else {
            out += " + " + print(t, Prec::product);
          }
          first = false;
        }
        return out;
      }
    }
    return {};
  }

  std::string product_body(const Expr& e) const {
    std::string out;
    std::size_t i = 0;
    const auto& ch = e.children();
    if (ch.front().is_constant()) {
      const Number& c = ch.front().value();
      if (c.is_minus_one() && c.is_exact()) {
        out = "-";
      } else {
        out = format_number(c) + "*";
      }
      i = 1;
    }
    for (bool first = true; i < ch.size(); ++i, first = false) {
      if (!first) out += "*";
      out += print(ch[i], Prec::power);
    }
    return out;
  }

  /// Splits t into (is_negative, |t|) for "a - b" rendering inside sums.
  static std::pair<bool, Expr> split_sign(const Expr& t) {
    if (t.kind() == Kind::negation) return {true, t.children().front()};
    if (t.kind() == Kind::constant && t.value().is_negative()) {
      return {true, Expr::constant(-t.value())};
    }
    if (t.kind() == Kind::product && t.children().front().is_constant() &&
        t.children().front().value().is_negative()) {
      std::vector<Expr> fs = t.children();
      fs.front() = Expr::constant(-fs.front().value());
      return {true, Expr::product(std::move(fs))};
    }
    return {false, t};
  }

  const CoordSystem& coords_;
};

}  // namespace detail

/// Parses the arithmetic grammar documented in the README into a canonical
/// expression over `coords`.
inline Expr parse_expr(std::string_view source, const CoordSystem& coords,
                       const Definitions& defs = {}) {
  return detail::Parser(source, coords, defs).run();
}

/// Renders `e` in the same grammar accepted by parse_expr.
inline std::string unparse(const Expr& e, const CoordSystem& coords) {
  return detail::Printer(coords).print(e, detail::Prec::sum);
}

}  // namespace subcurv
