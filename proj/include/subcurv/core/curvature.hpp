#pragma once

#include <cmath>
#include <cstdlib>
#include <span>
#include <vector>

#include "subcurv/calculus.hpp"
#include "subcurv/core/structure.hpp"

namespace subcurv {

inline constexpr double kDefaultEpsSing = 1e-7;

/// Singular threshold on |dφ|*: SUBCURV_EPS_SING when set to a positive
/// number, otherwise 1e-7.
inline double eps_sing_from_env() {
  if (const char* s = std::getenv("SUBCURV_EPS_SING")) {
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s && v > 0.0 && std::isfinite(v)) return v;
  }
  return kDefaultEpsSing;
}

/// G(ω)^l = Σ_k g^{lk} ω_k.
inline std::vector<Expr> raise_covector(const SubriemannianStructure& s,
                                        const std::vector<Expr>& omega) {
  if (omega.size() != s.dim()) {
    throw DimensionMismatch("covector has " + std::to_string(omega.size()) + " components, structure has " +
                            std::to_string(s.dim()) + " coordinates");
  }
  std::vector<Expr> v;
  v.reserve(s.dim());
  for (std::size_t l = 0; l < s.dim(); ++l) {
    std::vector<Expr> terms;
    for (std::size_t k = 0; k < s.dim(); ++k) {
      if (s.cometric[l][k].is_zero() || omega[k].is_zero()) continue;
      terms.push_back(s.cometric[l][k] * omega[k]);
    }
    v.push_back(Expr::sum(std::move(terms)));
  }
  return v;
}

/// <ω, η>* as an expression.
inline Expr cometric_pairing(const SubriemannianStructure& s, const std::vector<Expr>& omega,
                             const std::vector<Expr>& eta) {
  auto g_eta = raise_covector(s, eta);
  std::vector<Expr> terms;
  for (std::size_t l = 0; l < s.dim(); ++l) terms.push_back(omega[l] * g_eta[l]);
  return Expr::sum(std::move(terms));
}

/// Horizontal p-mean curvature of the level sets of φ, in weighted
/// divergence form
///   H = A⁻¹ Σ_l ∂_l( A |dφ|*^{p−1} Σ_k g^{lk} ∂_k φ ).
/// The symbolic work happens once; evaluation is cheap and thread-safe.
class CurvatureEvaluator {
 public:
  CurvatureEvaluator(const SubriemannianStructure& s, const Expr& phi, Rational p,
                     double eps_sing = eps_sing_from_env())
      : dim_(s.dim()), eps_(eps_sing) {
    if (p < Rational{0}) throw std::invalid_argument("p must be >= 0");
    auto dphi = gradient(phi, dim_);
    auto v = raise_covector(s, dphi);
    std::vector<Expr> q_terms;
    for (std::size_t l = 0; l < dim_; ++l) q_terms.push_back(dphi[l] * v[l]);
    conorm_sq_ = Expr::sum(std::move(q_terms));
    auto half = checked_mul(*checked_add(p, Rational{-1}), Rational{1, 2});
    Expr weight = s.density * Expr::power(conorm_sq_, *half);
    std::vector<Expr> div_terms;
    for (std::size_t l = 0; l < dim_; ++l) {
      if (v[l].is_zero()) continue;
      div_terms.push_back(differentiate(weight * v[l], l));
    }
    curvature_ = Expr::sum(std::move(div_terms)) / s.density;
    conorm_tape_ = Tape(conorm_sq_);
    curvature_tape_ = Tape(curvature_);
  }

  const Expr& conorm_squared_expr() const { return conorm_sq_; }
  const Expr& curvature_expr() const { return curvature_; }
  double eps_sing() const { return eps_; }

  double conorm(std::span<const double> x, std::vector<double>& work) const {
    check(x);
    return std::sqrt(std::max(0.0, conorm_tape_.scalar(x, work)));
  }
  double conorm(std::span<const double> x) const {
    std::vector<double> w;
    return conorm(x, w);
  }

  /// Throws SingularPoint when |dφ|* < eps_sing at x.
  double operator()(std::span<const double> x, std::vector<double>& work) const {
    double c = conorm(x, work);
    if (c < eps_) throw SingularPoint(c, eps_);
    return curvature_tape_.scalar(x, work);
  }
  double operator()(std::span<const double> x) const {
    std::vector<double> w;
    return (*this)(x, w);
  }

 private:
  void check(std::span<const double> x) const {
    if (x.size() != dim_) {
      throw DimensionMismatch("point has " + std::to_string(x.size()) + " coordinates, expected " +
                              std::to_string(dim_));
    }
  }

  std::size_t dim_;
  double eps_;
  Expr conorm_sq_;
  Expr curvature_;
  Tape conorm_tape_;
  Tape curvature_tape_;
};

inline double conorm(const SubriemannianStructure& s, const ScalarField& phi,
                     std::span<const double> point) {
  if (point.size() != s.dim()) throw DimensionMismatch("point dimension mismatch");
  auto dphi = gradient(phi.expr, s.dim());
  return std::sqrt(std::max(0.0, evaluate(cometric_pairing(s, dphi, dphi), point)));
}

inline double p_mean_curvature(const SubriemannianStructure& s, const ScalarField& phi, Rational p,
                               std::span<const double> point,
                               double eps_sing = eps_sing_from_env()) {
  return CurvatureEvaluator(s, phi.expr, p, eps_sing)(point);
}

/// Both sides of the identity
///   <ω−η, ω/|ω| − η/|η|>* = ½(|ω|+|η|)·|ω/|ω| − η/|η||*²
/// for numeric covectors under a numeric cometric g.
struct LemmaSides {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline LemmaSides lemma51_sides(const Matrix& g, const std::vector<double>& omega,
                                const std::vector<double>& eta) {
  // Extended precision: the left side cancels when ω and η are nearly parallel.
  using wide = long double;
  auto pair = [&](const std::vector<wide>& a, const std::vector<wide>& b) {
    wide s = 0.0L;
    for (std::size_t l = 0; l < a.size(); ++l) {
      for (std::size_t k = 0; k < b.size(); ++k) s += a[l] * static_cast<wide>(g[l][k]) * b[k];
    }
    return s;
  };
  std::vector<wide> w(omega.begin(), omega.end());
  std::vector<wide> e(eta.begin(), eta.end());
  wide no = std::sqrt(pair(w, w));
  wide ne = std::sqrt(pair(e, e));
  std::vector<wide> diff(w.size());
  std::vector<wide> unit_diff(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    diff[i] = w[i] - e[i];
    unit_diff[i] = w[i] / no - e[i] / ne;
  }
  return {static_cast<double>(pair(diff, unit_diff)),
          static_cast<double>(0.5L * (no + ne) * pair(unit_diff, unit_diff))};
}

}  // namespace subcurv
