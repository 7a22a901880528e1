#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <functional>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subcurv/calculus/number.hpp"

namespace subcurv {

enum class Kind : std::uint8_t { constant, variable, power, product, negation, sum };

class Expr;

namespace detail {
struct Node;
}

/// Immutable symbolic expression over indexed coordinates.
///
/// Every Expr is built through the canonicalizing constructors below, so
/// two structurally equal trees compare equal with operator==. The
/// simplification is shallow: constant folding, neutral elements, flattening
/// of nested sums and products, collection of like terms and of equal
/// bases. There is no polynomial normal form.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(Number value);
  static Expr variable(std::size_t index);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(Expr base, Rational exponent);

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::constant; }
  bool is_zero() const;
  bool is_one() const;
  const Number& value() const;          // constant only
  std::size_t index() const;            // variable only
  const Rational& exponent() const;     // power only
  const std::vector<Expr>& children() const;
  const Expr& base() const { return children().front(); }

  std::size_t hash() const;
  /// Bit i set when coordinate i (clamped to 63) occurs in the tree.
  std::uint64_t variable_mask() const;
  bool depends_on(std::size_t var) const {
    return (variable_mask() >> std::min<std::size_t>(var, 63)) & 1U;
  }
  const detail::Node* get() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
  /// Canonical total order (deterministic across runs).
  friend int compare(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  static Expr make(detail::Node node);
  friend struct detail::Node;

  std::shared_ptr<const detail::Node> node_;
};

namespace detail {

struct Node {
  Kind kind = Kind::constant;
  Number value;
  std::size_t index = 0;
  Rational exponent{1};
  std::vector<Expr> children;
  std::size_t hash = 0;
  std::uint64_t mask = 0;
};

inline std::size_t mix(std::size_t h, std::size_t v) {
  // splitmix-style combine; deterministic across platforms with 64-bit size_t
  v += 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  v ^= v >> 30;
  v *= 0xbf58476d1ce4e5b9ULL;
  v ^= v >> 27;
  v *= 0x94d049bb133111ebULL;
  v ^= v >> 31;
  return h ^ v;
}

inline std::size_t hash_number(const Number& n) {
  if (n.is_exact()) {
    return mix(mix(1, static_cast<std::size_t>(n.rational().num())),
               static_cast<std::size_t>(n.rational().den()));
  }
  double v = n.value();
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof bits);
  return mix(2, bits);
}

inline bool structurally_equal(const Node& a, const Node& b);

}  // namespace detail

inline Expr Expr::make(detail::Node node) {
  std::size_t h = static_cast<std::size_t>(node.kind) + 17;
  std::uint64_t mask = 0;
  switch (node.kind) {
    case Kind::constant:
      h = detail::mix(h, detail::hash_number(node.value));
      break;
    case Kind::variable:
      h = detail::mix(h, node.index);
      mask = std::uint64_t{1} << std::min<std::size_t>(node.index, 63);
      break;
    default:
      break;
  }
  if (node.kind == Kind::power) {
    h = detail::mix(h, static_cast<std::size_t>(node.exponent.num()));
    h = detail::mix(h, static_cast<std::size_t>(node.exponent.den()));
  }
  for (const auto& c : node.children) {
    h = detail::mix(h, c.hash());
    mask |= c.variable_mask();
  }
  node.hash = h;
  node.mask = mask;
  return Expr(std::make_shared<const detail::Node>(std::move(node)));
}

inline Expr::Expr() {
  static const Expr zero = [] {
    detail::Node n;
    n.kind = Kind::constant;
    n.value = Number{0};
    return make(std::move(n));
  }();
  node_ = zero.node_;
}

inline Kind Expr::kind() const { return node_->kind; }
inline const Number& Expr::value() const { return node_->value; }
inline std::size_t Expr::index() const { return node_->index; }
inline const Rational& Expr::exponent() const { return node_->exponent; }
inline const std::vector<Expr>& Expr::children() const { return node_->children; }
inline std::size_t Expr::hash() const { return node_->hash; }
inline std::uint64_t Expr::variable_mask() const { return node_->mask; }
inline bool Expr::is_zero() const { return kind() == Kind::constant && value().is_zero(); }
inline bool Expr::is_one() const { return kind() == Kind::constant && value().is_one(); }

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash()) return false;
  return detail::structurally_equal(*a.node_, *b.node_);
}

inline bool detail::structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case Kind::constant:
      return a.value == b.value;
    case Kind::variable:
      return a.index == b.index;
    case Kind::power:
      if (!(a.exponent == b.exponent)) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!(a.children[i] == b.children[i])) return false;
  }
  return true;
}

inline int compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Kind::constant:
      return compare(a.value(), b.value());
    case Kind::variable:
      return a.index() < b.index() ? -1 : (a.index() > b.index() ? 1 : 0);
    case Kind::power: {
      int c = compare(a.base(), b.base());
      if (c != 0) return c;
      if (a.exponent() < b.exponent()) return -1;
      if (b.exponent() < a.exponent()) return 1;
      return 0;
    }
    default:
      break;
  }
  if (a.hash() != b.hash()) return a.hash() < b.hash() ? -1 : 1;
  const auto& ac = a.children();
  const auto& bc = b.children();
  for (std::size_t i = 0; i < std::min(ac.size(), bc.size()); ++i) {
    int c = compare(ac[i], bc[i]);
    if (c != 0) return c;
  }
  if (ac.size() != bc.size()) return ac.size() < bc.size() ? -1 : 1;
  return 0;
}

namespace detail {

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

inline void sort_canonical(std::vector<Expr>& v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
}

/// Exact q-th root of a non-negative integer, if it exists.
inline std::optional<std::int64_t> exact_root(std::int64_t v, std::int64_t q) {
  if (v < 0) return std::nullopt;
  if (v == 0 || v == 1) return v;
  auto guess = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v),
                                                               1.0 / static_cast<double>(q))));
  for (std::int64_t c = std::max<std::int64_t>(guess - 1, 0); c <= guess + 1; ++c) {
    __int128 acc = 1;
    bool overflow = false;
    for (std::int64_t i = 0; i < q; ++i) {
      acc *= c;
      if (acc > static_cast<__int128>(v)) {
        overflow = true;
        break;
      }
    }
    if (!overflow && acc == static_cast<__int128>(v)) return c;
  }
  return std::nullopt;
}

}  // namespace detail

inline Expr Expr::constant(Number value) {
  if (value.is_exact() && value.is_zero()) return Expr{};
  detail::Node n;
  n.kind = Kind::constant;
  n.value = value;
  return make(std::move(n));
}

inline Expr Expr::variable(std::size_t index) {
  detail::Node n;
  n.kind = Kind::variable;
  n.index = index;
  return make(std::move(n));
}

inline Expr Expr::sum(std::vector<Expr> terms) {
  Number offset{0};
  std::vector<std::pair<Number, Expr>> collected;
  std::unordered_map<Expr, std::size_t, detail::ExprHash> slot;

  auto add = [&](const Number& coef, const Expr& rest) {
    auto [it, inserted] = slot.try_emplace(rest, collected.size());
    if (inserted) {
      collected.emplace_back(coef, rest);
    } else {
      collected[it->second].first = collected[it->second].first + coef;
    }
  };

  std::function<void(const Expr&, const Number&)> visit = [&](const Expr& t, const Number& f) {
    switch (t.kind()) {
      case Kind::constant:
        offset = offset + f * t.value();
        return;
      case Kind::sum:
        for (const auto& c : t.children()) visit(c, f);
        return;
      case Kind::negation:
        visit(t.children().front(), -f);
        return;
      case Kind::product: {
        const auto& ch = t.children();
        if (ch.front().is_constant()) {
          std::vector<Expr> rest(ch.begin() + 1, ch.end());
          Expr r;
          if (rest.size() == 1) {
            r = rest.front();
          } else {
            detail::Node n;
            n.kind = Kind::product;
            n.children = std::move(rest);
            r = make(std::move(n));
          }
          add(f * ch.front().value(), r);
          return;
        }
        add(f, t);
        return;
      }
      default:
        add(f, t);
        return;
    }
  };
  for (const auto& t : terms) visit(t, Number{1});

  std::vector<Expr> out;
  out.reserve(collected.size() + 1);
  for (auto& [coef, rest] : collected) {
    if (coef.is_zero()) continue;
    if (coef.is_one()) {
      out.push_back(rest);
    } else {
      out.push_back(product({constant(coef), rest}));
    }
  }
  if (!offset.is_zero()) out.push_back(constant(offset));
  if (out.empty()) return offset.is_exact() ? Expr{} : constant(offset);
  if (out.size() == 1) return out.front();
  detail::sort_canonical(out);
  detail::Node n;
  n.kind = Kind::sum;
  n.children = std::move(out);
  return make(std::move(n));
}

inline Expr Expr::product(std::vector<Expr> factors) {
  Number coef{1};
  std::vector<std::pair<Expr, Rational>> collected;
  std::unordered_map<Expr, std::size_t, detail::ExprHash> slot;

  auto add = [&](const Expr& base, const Rational& e) {
    auto it = slot.find(base);
    if (it != slot.end()) {
      if (auto s = checked_add(collected[it->second].second, e)) {
        collected[it->second].second = *s;
        return;
      }
    }
    slot.emplace(base, collected.size());
    collected.emplace_back(base, e);
  };

  std::function<void(const Expr&)> visit = [&](const Expr& f) {
    switch (f.kind()) {
      case Kind::constant:
        coef = coef * f.value();
        return;
      case Kind::product:
        for (const auto& c : f.children()) visit(c);
        return;
      case Kind::negation:
        coef = -coef;
        visit(f.children().front());
        return;
      case Kind::power:
        add(f.base(), f.exponent());
        return;
      default:
        add(f, Rational{1});
        return;
    }
  };
  for (const auto& f : factors) visit(f);

  if (coef.is_zero()) return coef.is_exact() ? Expr{} : constant(coef);

  std::vector<Expr> out;
  out.reserve(collected.size());
  for (auto& [base, e] : collected) {
    Expr p = power(base, e);
    switch (p.kind()) {
      case Kind::constant:
        coef = coef * p.value();
        break;
      case Kind::negation:
        coef = -coef;
        out.push_back(p.children().front());
        break;
      case Kind::product:
        for (const auto& c : p.children()) {
          if (c.is_constant()) {
            coef = coef * c.value();
          } else {
            out.push_back(c);
          }
        }
        break;
      default:
        out.push_back(std::move(p));
    }
  }
  if (coef.is_zero()) return coef.is_exact() ? Expr{} : constant(coef);
  if (out.empty()) return constant(coef);
  detail::sort_canonical(out);
  if (out.size() == 1 && coef.is_one()) return out.front();
  if (out.size() == 1 && coef.is_minus_one() && coef.is_exact()) {
    detail::Node n;
    n.kind = Kind::negation;
    n.children = {out.front()};
    return make(std::move(n));
  }
  detail::Node n;
  n.kind = Kind::product;
  if (!coef.is_one()) n.children.push_back(constant(coef));
  for (auto& o : out) n.children.push_back(std::move(o));
  return make(std::move(n));
}

inline Expr Expr::power(Expr base, Rational e) {
  if (e.is_zero()) return constant(Number{1});
  if (e == Rational{1}) return base;

  auto keep = [&] {
    detail::Node n;
    n.kind = Kind::power;
    n.exponent = e;
    n.children = {std::move(base)};
    return make(std::move(n));
  };

  switch (base.kind()) {
    case Kind::constant: {
      const Number& b = base.value();
      if (b.is_zero()) {
        if (e < Rational{0}) return keep();  // surfaces as DivisionByZero at evaluation
        return b.is_exact() ? Expr{} : constant(b);
      }
      if (b.is_exact()) {
        if (e.is_integer()) {
          if (auto r = checked_pow(b.rational(), e.num())) return constant(Number{*r});
          return constant(Number::inexact(std::pow(b.value(), e.to_double())));
        }
        if (b.is_negative()) return keep();
        auto rn = detail::exact_root(b.rational().num(), e.den());
        auto rd = detail::exact_root(b.rational().den(), e.den());
        if (rn && rd) {
          if (auto r = checked_pow(Rational{*rn, *rd}, e.num())) return constant(Number{*r});
        }
        return keep();
      }
      if (e.is_integer() || !b.is_negative()) {
        return constant(Number::inexact(std::pow(b.value(), e.to_double())));
      }
      return keep();
    }
    case Kind::power:
      if (e.is_integer()) {
        if (auto ne = checked_mul(base.exponent(), e)) return power(base.base(), *ne);
      }
      return keep();
    case Kind::negation:
      if (e.is_integer()) {
        Expr inner = power(base.children().front(), e);
        if (e.num() % 2 == 0) return inner;
        return product({constant(Number{-1}), inner});
      }
      return keep();
    case Kind::product:
      if (e.is_integer()) {
        std::vector<Expr> fs;
        fs.reserve(base.children().size());
        for (const auto& c : base.children()) fs.push_back(power(c, e));
        return product(std::move(fs));
      }
      return keep();
    default:
      return keep();
  }
}

// ---- operator sugar --------------------------------------------------------

inline Expr constant(std::int64_t v) { return Expr::constant(Number{v}); }
inline Expr constant(Rational r) { return Expr::constant(Number{r}); }
inline Expr variable(std::size_t i) { return Expr::variable(i); }
inline Expr pow(const Expr& b, Rational e) { return Expr::power(b, e); }
inline Expr sqrt(const Expr& b) { return Expr::power(b, Rational{1, 2}); }

inline Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
inline Expr operator-(const Expr& a) { return Expr::product({constant(-1), a}); }
inline Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
inline Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
inline Expr operator/(const Expr& a, const Expr& b) {
  return Expr::product({a, Expr::power(b, Rational{-1})});
}
inline Expr operator+(const Expr& a, std::int64_t b) { return a + constant(b); }
inline Expr operator-(const Expr& a, std::int64_t b) { return a - constant(b); }
inline Expr operator*(std::int64_t a, const Expr& b) { return constant(a) * b; }
inline Expr operator*(Rational a, const Expr& b) { return constant(a) * b; }

/// Number of distinct nodes (by identity) in the DAG.
inline std::size_t node_count(const Expr& e) {
  std::unordered_map<const detail::Node*, bool> seen;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (!seen.emplace(x.get(), true).second) return;
    for (const auto& c : x.children()) walk(c);
  };
  walk(e);
  return seen.size();
}

/// Largest coordinate index referenced, or nullopt for closed constants.
inline std::optional<std::size_t> max_variable(const Expr& e) {
  std::optional<std::size_t> best;
  std::unordered_map<const detail::Node*, bool> seen;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (!seen.emplace(x.get(), true).second) return;
    if (x.kind() == Kind::variable) {
      if (!best || x.index() > *best) best = x.index();
    }
    for (const auto& c : x.children()) walk(c);
  };
  walk(e);
  return best;
}

}  // namespace subcurv
