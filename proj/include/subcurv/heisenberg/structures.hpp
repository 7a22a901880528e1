#pragma once

#include <string>
#include <vector>

#include "subcurv/core/structure.hpp"

namespace subcurv {

inline CoordSystem heisenberg_coords(int n) {
  std::vector<std::string> names;
  for (int j = 1; j <= n; ++j) names.push_back("x" + std::to_string(j));
  for (int j = 1; j <= n; ++j) names.push_back("y" + std::to_string(j));
  names.push_back("z");
  return CoordSystem(std::move(names));
}

/// r² = Σ x_j² + y_j² in the coordinates of H_n.
inline Expr heisenberg_r2(int n) {
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < static_cast<std::size_t>(2 * n); ++i) terms.push_back(pow(variable(i), 2));
  return Expr::sum(std::move(terms));
}

/// ρ = (r⁴ + 4z²)^{1/4}.
inline Expr heisenberg_rho(int n) {
  return pow(pow(heisenberg_r2(n), 2) + 4 * pow(variable(static_cast<std::size_t>(2 * n)), 2),
             Rational{1, 4});
}

/// Left-invariant frame ê_j = ∂x_j + y_j ∂z, ê_{j'} = ∂y_j − x_j ∂z.
inline std::vector<VectorFieldExpr> heisenberg_frames(int n) {
  const auto dim = static_cast<std::size_t>(2 * n + 1);
  const std::size_t zi = dim - 1;
  std::vector<VectorFieldExpr> out;
  for (int j = 0; j < n; ++j) {
    VectorFieldExpr e{std::vector<Expr>(dim)};
    e.components[static_cast<std::size_t>(j)] = constant(1);
    e.components[zi] = variable(static_cast<std::size_t>(n + j));
    out.push_back(std::move(e));
  }
  for (int j = 0; j < n; ++j) {
    VectorFieldExpr e{std::vector<Expr>(dim)};
    e.components[static_cast<std::size_t>(n + j)] = constant(1);
    e.components[zi] = -variable(static_cast<std::size_t>(j));
    out.push_back(std::move(e));
  }
  return out;
}

/// Contact form Θ = dz + Σ (x_j dy_j − y_j dx_j) as a covector.
inline std::vector<Expr> heisenberg_contact_form(int n) {
  const auto dim = static_cast<std::size_t>(2 * n + 1);
  std::vector<Expr> theta(dim);
  for (int j = 0; j < n; ++j) {
    theta[static_cast<std::size_t>(j)] = -variable(static_cast<std::size_t>(n + j));
    theta[static_cast<std::size_t>(n + j)] = variable(static_cast<std::size_t>(j));
  }
  theta.back() = constant(1);
  return theta;
}

/// g = Σ_I X_I X_Iᵀ.
inline std::vector<std::vector<Expr>> cometric_from_frames(const std::vector<VectorFieldExpr>& frames,
                                                           std::size_t dim) {
  std::vector<std::vector<Expr>> g(dim, std::vector<Expr>(dim));
  for (std::size_t l = 0; l < dim; ++l) {
    for (std::size_t k = l; k < dim; ++k) {
      std::vector<Expr> terms;
      for (const auto& f : frames) {
        if (f.components[l].is_zero() || f.components[k].is_zero()) continue;
        terms.push_back(f.components[l] * f.components[k]);
      }
      g[l][k] = Expr::sum(std::move(terms));
      g[k][l] = g[l][k];
    }
  }
  return g;
}

inline void check_heisenberg_n(int n) {
  if (n < 1) throw std::invalid_argument("Heisenberg dimension n must be >= 1");
}

inline SubriemannianStructure standard_structure(int n) {
  check_heisenberg_n(n);
  SubriemannianStructure s;
  s.name = "heisenberg(" + std::to_string(n) + ")";
  s.coords = heisenberg_coords(n);
  auto frames = heisenberg_frames(n);
  s.cometric = cometric_from_frames(frames, s.dim());
  s.density = constant(1);
  s.degeneracy = 1;
  s.frame_fields = std::move(frames);
  s.definitions = {{"r2", heisenberg_r2(n)}, {"rho", heisenberg_rho(n)}};
  return s;
}

/// Cometric ρ² × standard, density ρ^{−(2n+2)}, frame ρ ê_I. Undefined at
/// the origin.
inline SubriemannianStructure cylinder_structure(int n) {
  check_heisenberg_n(n);
  SubriemannianStructure s = standard_structure(n);
  s.name = "cylinder(" + std::to_string(n) + ")";
  Expr rho = heisenberg_rho(n);
  Expr rho2 = pow(rho, 2);
  for (auto& row : s.cometric) {
    for (auto& g : row) g = rho2 * g;
  }
  s.density = pow(rho, Rational{-(2 * n + 2)});
  for (auto& f : *s.frame_fields) f = rho * f;
  return s;
}

/// F_j = (−x², x¹, −x⁴, x³, …) for even m.
inline std::vector<Expr> default_F(int m) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("default F needs an even m >= 2");
  std::vector<Expr> f;
  for (int k = 0; k < m; k += 2) {
    f.push_back(-variable(static_cast<std::size_t>(k + 1)));
    f.push_back(variable(static_cast<std::size_t>(k)));
  }
  return f;
}

inline CoordSystem graph_coords(int m) {
  std::vector<std::string> names;
  for (int j = 1; j <= m + 1; ++j) names.push_back("x" + std::to_string(j));
  return CoordSystem(std::move(names));
}

/// Graph structure on R^{m+1}: frame e_j = ∂_j − F_j ∂_{m+1}, cometric
/// [[I, −F], [−Fᵀ, |F|²]], null coform dx^{m+1} + Σ F_j dx^j.
inline SubriemannianStructure theoremF_structure(const std::vector<Expr>& F, int m) {
  if (m < 1 || F.size() != static_cast<std::size_t>(m)) {
    throw DimensionMismatch("F needs exactly m components");
  }
  for (const auto& f : F) {
    if (auto v = max_variable(f); v && *v >= static_cast<std::size_t>(m)) {
      throw std::invalid_argument("F may depend only on x1..xm");
    }
  }
  const auto dim = static_cast<std::size_t>(m + 1);
  SubriemannianStructure s;
  s.name = "graph_F(" + std::to_string(m) + ")";
  s.coords = graph_coords(m);
  std::vector<VectorFieldExpr> frames;
  for (std::size_t j = 0; j < static_cast<std::size_t>(m); ++j) {
    VectorFieldExpr e{std::vector<Expr>(dim)};
    e.components[j] = constant(1);
    e.components[dim - 1] = -F[j];
    frames.push_back(std::move(e));
  }
  s.cometric = cometric_from_frames(frames, dim);
  s.density = constant(1);
  s.degeneracy = 1;
  s.frame_fields = std::move(frames);
  return s;
}

inline std::vector<Expr> theoremF_null_coform(const std::vector<Expr>& F) {
  std::vector<Expr> w(F);
  w.push_back(constant(1));
  return w;
}

}  // namespace subcurv
