#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "subcurv/calculus.hpp"

namespace subcurv::testing {

/// Fixed-seed generator; every test owns its own instance.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  std::vector<double> point(std::size_t dim, double lo, double hi) {
    std::vector<double> x(dim);
    for (auto& c : x) c = uniform(lo, hi);
    return x;
  }

  /// Sum of `terms` monomials with small integer coefficients, each of total
  /// degree at most `degree`.
  Expr polynomial(std::size_t dim, int degree, int terms) {
    std::vector<Expr> out;
    for (int t = 0; t < terms; ++t) {
      std::vector<Expr> factors{constant(integer(-3, 3))};
      int left = integer(0, degree);
      while (left > 0) {
        int k = integer(1, left);
        factors.push_back(pow(variable(static_cast<std::size_t>(integer(0, static_cast<int>(dim) - 1))), k));
        left -= k;
      }
      out.push_back(Expr::product(std::move(factors)));
    }
    return Expr::sum(std::move(out));
  }

  /// Polynomial plus a positive base raised to a rational power; smooth on
  /// all of R^dim.
  Expr mixed(std::size_t dim) {
    Expr p = polynomial(dim, 3, 3);
    Expr q = polynomial(dim, 2, 2);
    Rational ex{integer(-3, 5), integer(1, 4)};
    if (ex.is_zero()) ex = Rational{1, 3};
    return p + pow(constant(1) + pow(q, 2), ex);
  }

 private:
  std::mt19937_64 gen_;
};

/// Central difference of f along axis i with step h.
inline double central_difference(const std::function<double(std::span<const double>)>& f, std::vector<double> x,
                                 std::size_t i, double h = 1e-5) {
  const double x0 = x[i];
  x[i] = x0 + h;
  double fp = f(x);
  x[i] = x0 - h;
  double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

/// Fourth-order central difference; the wider step keeps roundoff small
/// where |f| is large relative to its derivative.
inline double central_difference4(const std::function<double(std::span<const double>)>& f, std::vector<double> x,
                                  std::size_t i, double h = 1e-3) {
  const double x0 = x[i];
  auto at = [&](double d) {
    x[i] = x0 + d;
    return f(x);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace subcurv::testing
