#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "subcurv/calculus.hpp"
#include "subcurv/core/curvature.hpp"
#include "subcurv/core/structure.hpp"

namespace subcurv {

/// H_F(u) = div((∇u + F)/|∇u + F|) on R^m, with singular set ∇u + F = 0.
class GraphHFOperator {
 public:
  GraphHFOperator(const std::vector<Expr>& F, const Expr& u, double eps_sing = eps_sing_from_env())
      : m_(F.size()), eps_(eps_sing) {
    std::vector<Expr> w;
    std::vector<Expr> sq;
    for (std::size_t j = 0; j < m_; ++j) {
      w.push_back(differentiate(u, j) + F[j]);
      sq.push_back(pow(w.back(), 2));
    }
    q_ = Expr::sum(std::move(sq));
    Expr inv = pow(q_, Rational{-1, 2});
    std::vector<Expr> div;
    for (std::size_t j = 0; j < m_; ++j) {
      normal_.push_back(w[j] * inv);
      div.push_back(differentiate(normal_.back(), j));
    }
    h_ = Expr::sum(std::move(div));
    q_tape_ = Tape(q_);
    h_tape_ = Tape(h_);
    n_tape_ = Tape(normal_);
  }

  std::size_t dim() const { return m_; }
  const Expr& norm_squared_expr() const { return q_; }
  const Expr& curvature_expr() const { return h_; }
  const std::vector<Expr>& normal_expr() const { return normal_; }

  /// |∇u + F| at x.
  double norm(std::span<const double> x, std::vector<double>& work) const {
    return std::sqrt(std::max(0.0, q_tape_.scalar(x, work)));
  }
  double operator()(std::span<const double> x, std::vector<double>& work) const {
    double c = norm(x, work);
    if (c < eps_) throw SingularPoint(c, eps_);
    return h_tape_.scalar(x, work);
  }
  double operator()(std::span<const double> x) const {
    std::vector<double> w;
    return (*this)(x, w);
  }
  /// Legendrian normal N_F at x.
  std::vector<double> normal(std::span<const double> x) const {
    std::vector<double> w;
    double c = norm(x, w);
    if (c < eps_) throw SingularPoint(c, eps_);
    return n_tape_(x);
  }

 private:
  std::size_t m_;
  double eps_;
  Expr q_;
  Expr h_;
  std::vector<Expr> normal_;
  Tape q_tape_;
  Tape h_tape_;
  Tape n_tape_;
};

inline double graph_operator_HF(const std::vector<Expr>& F, const ScalarField& u,
                                std::span<const double> point) {
  if (point.size() != F.size()) throw DimensionMismatch("point must lie in R^m");
  return GraphHFOperator(F, u.expr)(point);
}

/// Chart (η², …, η²ⁿ, τ) used by the l_a-graph and intrinsic-graph
/// operators: η^k sits at index k − 2 and τ at index 2n − 1.
inline CoordSystem la_chart_coords(int n) {
  std::vector<std::string> names;
  for (int k = 2; k <= 2 * n; ++k) names.push_back("eta" + std::to_string(k));
  names.push_back("tau");
  return CoordSystem(std::move(names));
}

namespace detail {

inline std::size_t eta(int k) { return static_cast<std::size_t>(k - 2); }
inline std::size_t tau(int n) { return static_cast<std::size_t>(2 * n - 1); }

/// Chart fields ê_j = ∂η^j + η^{n+j}∂τ and ê_{n+j} = ∂η^{n+j} − η^j∂τ for
/// j = 2..n, plus ∂η^{n+1} in the middle slot. `middle_tau` adds a ∂τ
/// component to the middle field.
inline std::vector<VectorFieldExpr> chart_fields(int n, const Expr& middle_tau) {
  const auto d = static_cast<std::size_t>(2 * n);
  auto field = [&] { return VectorFieldExpr{std::vector<Expr>(d)}; };
  std::vector<VectorFieldExpr> out;
  for (int j = 2; j <= n; ++j) {
    auto e = field();
    e.components[eta(j)] = constant(1);
    e.components[tau(n)] = variable(eta(n + j));
    out.push_back(std::move(e));
  }
  auto mid = field();
  mid.components[eta(n + 1)] = constant(1);
  mid.components[tau(n)] = middle_tau;
  out.push_back(std::move(mid));
  for (int j = 2; j <= n; ++j) {
    auto e = field();
    e.components[eta(n + j)] = constant(1);
    e.components[tau(n)] = -variable(eta(j));
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace detail

/// Curvature of the graph x¹ = u(η, τ) transversal to the translations
/// l_a, written in the chart fields:
///   H = 2η^{n+1}∂τ((−1 + 2η^{n+1}∂τu)/D) + Σ_W W(Wu/D),
///   D = (1 − 4η^{n+1}∂τu + |Wu|²)^{1/2}.
class LaGraphOperator {
 public:
  LaGraphOperator(int n, const Expr& u, double eps_sing = eps_sing_from_env()) : n_(n), eps_(eps_sing) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    const Expr eta_mid = variable(detail::eta(n + 1));
    const Expr u_tau = differentiate(u, detail::tau(n));
    auto fields = detail::chart_fields(n, Expr{});
    std::vector<Expr> wu;
    std::vector<Expr> sq{constant(1), -(4 * (eta_mid * u_tau))};
    for (const auto& f : fields) {
      wu.push_back(f.apply(u));
      sq.push_back(pow(wu.back(), 2));
    }
    d2_ = Expr::sum(std::move(sq));
    Expr inv_d = pow(d2_, Rational{-1, 2});
    std::vector<Expr> terms;
    terms.push_back(2 * (eta_mid * differentiate((constant(-1) + constant(2) * eta_mid * u_tau) * inv_d,
                                                 detail::tau(n))));
    for (std::size_t k = 0; k < fields.size(); ++k) terms.push_back(fields[k].apply(wu[k] * inv_d));
    h_ = Expr::sum(std::move(terms));
    d2_tape_ = Tape(d2_);
    h_tape_ = Tape(h_);
  }

  const Expr& curvature_expr() const { return h_; }
  const Expr& d_squared_expr() const { return d2_; }

  double d(std::span<const double> x, std::vector<double>& work) const {
    return std::sqrt(std::max(0.0, d2_tape_.scalar(x, work)));
  }
  double operator()(std::span<const double> x, std::vector<double>& work) const {
    check(x);
    double dv = d(x, work);
    if (dv < eps_) throw SingularPoint(dv, eps_);
    return h_tape_.scalar(x, work);
  }
  double operator()(std::span<const double> x) const {
    std::vector<double> w;
    return (*this)(x, w);
  }

 private:
  void check(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(2 * n_)) throw DimensionMismatch("chart point needs 2n coordinates");
  }
  int n_;
  double eps_;
  Expr d2_;
  Expr h_;
  Tape d2_tape_;
  Tape h_tape_;
};

inline double la_graph_curvature(int n, const ScalarField& u, std::span<const double> point) {
  return LaGraphOperator(n, u.expr)(point);
}

/// Curvature of the intrinsic graph (0, η, τ)∘(u, 0, …, 0):
///   H = Σ_W W^u(W^u u / (1 + |W^u u|²)^{1/2}),
/// where the middle field ê^u_{n+1} = ∂η^{n+1} − 2u∂τ carries u itself.
class IntrinsicGraphOperator {
 public:
  IntrinsicGraphOperator(int n, const Expr& u) : n_(n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    auto fields = detail::chart_fields(n, -(2 * u));
    std::vector<Expr> wu;
    std::vector<Expr> sq{constant(1)};
    for (const auto& f : fields) {
      wu.push_back(f.apply(u));
      sq.push_back(pow(wu.back(), 2));
    }
    Expr inv = pow(Expr::sum(std::move(sq)), Rational{-1, 2});
    std::vector<Expr> terms;
    for (std::size_t k = 0; k < fields.size(); ++k) terms.push_back(fields[k].apply(wu[k] * inv));
    h_ = Expr::sum(std::move(terms));
    h_tape_ = Tape(h_);
  }

  const Expr& curvature_expr() const { return h_; }
  double operator()(std::span<const double> x, std::vector<double>& work) const {
    if (x.size() != static_cast<std::size_t>(2 * n_)) throw DimensionMismatch("chart point needs 2n coordinates");
    return h_tape_.scalar(x, work);
  }
  double operator()(std::span<const double> x) const {
    std::vector<double> w;
    return (*this)(x, w);
  }

 private:
  int n_;
  Expr h_;
  Tape h_tape_;
};

inline double intrinsic_graph_curvature(int n, const ScalarField& u, std::span<const double> point) {
  return IntrinsicGraphOperator(n, u.expr)(point);
}

/// Cylinder curvature of the radial graph z = u(r), u an expression in the
/// single coordinate r (index 0):
///   H = ρ r^{1−2n} (u′ r^{2n−1}/s)′ − (2n+1) r²(r u′ − 2u)/(ρ³ s),
///   s = (u′² + r²)^{1/2}, ρ = (r⁴ + 4u²)^{1/4}.
class RadialCylinderOperator {
 public:
  RadialCylinderOperator(int n, const Expr& u, double eps_sing = eps_sing_from_env()) : eps_(eps_sing) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (auto v = max_variable(u); v && *v > 0) throw std::invalid_argument("radial profile may depend on r only");
    const Expr r = variable(0);
    const Expr up = differentiate(u, 0);
    s2_ = pow(up, 2) + pow(r, 2);
    const Expr s = pow(s2_, Rational{1, 2});
    const Expr rho = pow(pow(r, 4) + 4 * pow(u, 2), Rational{1, 4});
    const Rational k{2 * n - 1};
    Expr flux = up * pow(r, k) / s;
    h_ = rho * pow(r, -k) * differentiate(flux, 0) -
         constant(2 * n + 1) * pow(r, 2) * (r * up - 2 * u) / (pow(rho, 3) * s);
    s2_tape_ = Tape(s2_);
    h_tape_ = Tape(h_);
  }

  const Expr& curvature_expr() const { return h_; }

  /// s = (u′² + r²)^{1/2} at r0; it is |dφ|_{H_n} / r of φ = u − z.
  double s(double r0) const {
    std::vector<double> w;
    const double x[1] = {r0};
    return std::sqrt(std::max(0.0, s2_tape_.scalar(x, w)));
  }
  double operator()(double r0) const {
    if (!(r0 > 0.0)) throw NonSmoothPoint("radial curvature needs r0 > 0");
    double sv = s(r0);
    if (sv < eps_) throw SingularPoint(sv, eps_);
    std::vector<double> w;
    const double x[1] = {r0};
    return h_tape_.scalar(x, w);
  }

 private:
  double eps_;
  Expr s2_;
  Expr h_;
  Tape s2_tape_;
  Tape h_tape_;
};

inline double radial_cylinder_curvature(const Expr& u, int n, double r0) {
  return RadialCylinderOperator(n, u)(r0);
}

}  // namespace subcurv
