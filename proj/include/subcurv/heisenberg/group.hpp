#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "subcurv/calculus.hpp"

namespace subcurv {

/// Point (x1..xn, y1..yn, z) of the Heisenberg group H_n.
struct HeisenbergPoint {
  int n = 1;
  std::vector<double> coords;

  HeisenbergPoint() : coords(3, 0.0) {}
  HeisenbergPoint(int n, std::vector<double> c) : n(n), coords(std::move(c)) {
    if (n < 1) throw std::invalid_argument("Heisenberg dimension n must be >= 1");
    if (coords.size() != static_cast<std::size_t>(2 * n + 1)) {
      throw DimensionMismatch("H_" + std::to_string(n) + " point needs " + std::to_string(2 * n + 1) +
                              " coordinates");
    }
  }
  static HeisenbergPoint identity(int n) {
    return HeisenbergPoint(n, std::vector<double>(static_cast<std::size_t>(2 * n + 1), 0.0));
  }

  double x(int j) const { return coords[static_cast<std::size_t>(j)]; }      // j in [0, n)
  double y(int j) const { return coords[static_cast<std::size_t>(n + j)]; }  // j in [0, n)
  double z() const { return coords.back(); }
};

/// (a,b,c)∘(x,y,z) = (a+x, b+y, c+z+Σ(b_j x_j − a_j y_j)).
inline HeisenbergPoint group_mul(const HeisenbergPoint& p, const HeisenbergPoint& q) {
  if (p.n != q.n) throw DimensionMismatch("group_mul of points in different H_n");
  HeisenbergPoint r = p;
  double twist = 0.0;
  for (int j = 0; j < p.n; ++j) twist += p.y(j) * q.x(j) - p.x(j) * q.y(j);
  for (std::size_t i = 0; i + 1 < r.coords.size(); ++i) r.coords[i] += q.coords[i];
  r.coords.back() += q.z() + twist;
  return r;
}

inline HeisenbergPoint inverse(const HeisenbergPoint& p) {
  HeisenbergPoint r = p;
  for (auto& c : r.coords) c = -c;
  return r;
}

/// ρ = (r⁴ + 4z²)^{1/4}.
inline double heisenberg_rho(const HeisenbergPoint& p) {
  double r2 = 0.0;
  for (std::size_t i = 0; i + 1 < p.coords.size(); ++i) r2 += p.coords[i] * p.coords[i];
  return std::sqrt(std::sqrt(r2 * r2 + 4.0 * p.z() * p.z()));
}

struct LeftTranslation {
  HeisenbergPoint by;
};
/// (x¹+a, x², …, x^{2n}, z − a·x^{n+1}).
struct LaTranslation {
  double a = 0.0;
};
/// (λx, λ²z).
struct Dilation {
  double lambda = 1.0;
};
/// x¹ ↦ x^{n+1}, x^{n+1} ↦ −x¹, other coordinates fixed.
struct RotationSwap {};

using IsometryKind = std::variant<LeftTranslation, LaTranslation, Dilation, RotationSwap>;

inline HeisenbergPoint apply_isometry(const IsometryKind& k, const HeisenbergPoint& q) {
  return std::visit(
      [&](const auto& iso) -> HeisenbergPoint {
        using T = std::decay_t<decltype(iso)>;
        if constexpr (std::is_same_v<T, LeftTranslation>) {
          return group_mul(iso.by, q);
        } else if constexpr (std::is_same_v<T, LaTranslation>) {
          HeisenbergPoint r = q;
          r.coords[0] += iso.a;
          r.coords.back() -= iso.a * q.y(0);
          return r;
        } else if constexpr (std::is_same_v<T, Dilation>) {
          if (iso.lambda == 0.0 || !std::isfinite(iso.lambda)) {
            throw std::invalid_argument("dilation factor must be finite and nonzero");
          }
          HeisenbergPoint r = q;
          for (std::size_t i = 0; i + 1 < r.coords.size(); ++i) r.coords[i] *= iso.lambda;
          r.coords.back() *= iso.lambda * iso.lambda;
          return r;
        } else {
          HeisenbergPoint r = q;
          r.coords[0] = q.y(0);
          r.coords[static_cast<std::size_t>(q.n)] = -q.x(0);
          return r;
        }
      },
      k);
}

namespace detail {
inline Expr number_expr(double v) {
  if (v == std::trunc(v) && std::abs(v) < 1e15) return constant(static_cast<std::int64_t>(v));
  return Expr::constant(Number::inexact(v));
}
}  // namespace detail

/// The isometry as coordinate expressions: entry i is the i-th coordinate
/// of Ψ(q) in terms of q. Composing φ with it via substitute gives φ∘Ψ.
inline std::vector<Expr> isometry_map(const IsometryKind& k, int n) {
  const auto dim = static_cast<std::size_t>(2 * n + 1);
  std::vector<Expr> m = identity_map(dim);
  std::visit(
      [&](const auto& iso) {
        using T = std::decay_t<decltype(iso)>;
        if constexpr (std::is_same_v<T, LeftTranslation>) {
          if (iso.by.n != n) throw DimensionMismatch("translation in a different H_n");
          std::vector<Expr> twist;
          for (int j = 0; j < n; ++j) {
            twist.push_back(detail::number_expr(iso.by.y(j)) * variable(static_cast<std::size_t>(j)));
            twist.push_back(-(detail::number_expr(iso.by.x(j)) * variable(static_cast<std::size_t>(n + j))));
          }
          for (std::size_t i = 0; i + 1 < dim; ++i) m[i] = m[i] + detail::number_expr(iso.by.coords[i]);
          twist.push_back(m.back());
          twist.push_back(detail::number_expr(iso.by.z()));
          m.back() = Expr::sum(std::move(twist));
        } else if constexpr (std::is_same_v<T, LaTranslation>) {
          m[0] = m[0] + detail::number_expr(iso.a);
          m.back() = m.back() - detail::number_expr(iso.a) * variable(static_cast<std::size_t>(n));
        } else if constexpr (std::is_same_v<T, Dilation>) {
          if (iso.lambda == 0.0 || !std::isfinite(iso.lambda)) {
            throw std::invalid_argument("dilation factor must be finite and nonzero");
          }
          for (std::size_t i = 0; i + 1 < dim; ++i) m[i] = detail::number_expr(iso.lambda) * m[i];
          m.back() = detail::number_expr(iso.lambda * iso.lambda) * m.back();
        } else {
          m[0] = variable(static_cast<std::size_t>(n));
          m[static_cast<std::size_t>(n)] = -variable(0);
        }
      },
      k);
  return m;
}

}  // namespace subcurv
