#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "subcurv/calculus/errors.hpp"
#include "subcurv/calculus/expr.hpp"

namespace subcurv {

namespace detail {

class Differentiator {
 public:
  explicit Differentiator(std::size_t var) : var_(var) {}

  Expr operator()(const Expr& e) {
    if (!e.depends_on(var_)) return Expr{};
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    Expr d = compute(e);
    memo_.emplace(e.get(), d);
    keep_.push_back(e);
    return d;
  }

 private:
  Expr compute(const Expr& e) {
    const auto& ch = e.children();
    switch (e.kind()) {
      case Kind::constant:
        return Expr{};
      case Kind::variable:
        return e.index() == var_ ? constant(1) : Expr{};
      case Kind::negation:
        return -(*this)(ch.front());
      case Kind::sum: {
        std::vector<Expr> terms;
        terms.reserve(ch.size());
        for (const auto& c : ch) terms.push_back((*this)(c));
        return Expr::sum(std::move(terms));
      }
      case Kind::product: {
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < ch.size(); ++i) {
          Expr di = (*this)(ch[i]);
          if (di.is_zero()) continue;
          std::vector<Expr> fs = ch;
          fs[i] = di;
          terms.push_back(Expr::product(std::move(fs)));
        }
        return Expr::sum(std::move(terms));
      }
      case Kind::power: {
        Expr db = (*this)(ch.front());
        if (db.is_zero()) return Expr{};
        Rational e1 = e.exponent();
        auto lowered = checked_add(e1, Rational{-1});
        if (!lowered) throw std::overflow_error("exponent out of range");
        return Expr::product({constant(e1), Expr::power(ch.front(), *lowered), db});
      }
    }
    return Expr{};
  }

  std::size_t var_;
  std::unordered_map<const Node*, Expr> memo_;
  std::vector<Expr> keep_;  // pins memo keys
};

}  // namespace detail

/// Exact partial derivative with respect to coordinate `var`.
inline Expr differentiate(const Expr& e, std::size_t var) {
  detail::Differentiator d(var);
  return d(e);
}

/// Gradient with respect to the first `dim` coordinates.
inline std::vector<Expr> gradient(const Expr& e, std::size_t dim) {
  std::vector<Expr> g;
  g.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) g.push_back(differentiate(e, i));
  return g;
}

/// Replaces every variable i with `values[i]`. Variables beyond the table
/// are an error.
inline Expr substitute(const Expr& e, const std::vector<Expr>& values) {
  std::unordered_map<const detail::Node*, Expr> memo;
  std::vector<Expr> keep;
  std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
    if (x.variable_mask() == 0) return x;
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    Expr r;
    switch (x.kind()) {
      case Kind::variable:
        if (x.index() >= values.size()) {
          throw DimensionMismatch("substitute: variable index " + std::to_string(x.index()) +
                                  " has no replacement");
        }
        r = values[x.index()];
        break;
      case Kind::negation:
        r = -go(x.children().front());
        break;
      case Kind::power:
        r = Expr::power(go(x.base()), x.exponent());
        break;
      case Kind::sum:
      case Kind::product: {
        std::vector<Expr> cs;
        cs.reserve(x.children().size());
        for (const auto& c : x.children()) cs.push_back(go(c));
        r = x.kind() == Kind::sum ? Expr::sum(std::move(cs)) : Expr::product(std::move(cs));
        break;
      }
      case Kind::constant:
        r = x;
        break;
    }
    memo.emplace(x.get(), r);
    keep.push_back(x);
    return r;
  };
  return go(e);
}

/// Identity substitution table of length `dim`, handy for editing a few
/// coordinates.
inline std::vector<Expr> identity_map(std::size_t dim) {
  std::vector<Expr> v;
  v.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) v.push_back(variable(i));
  return v;
}

}  // namespace subcurv
