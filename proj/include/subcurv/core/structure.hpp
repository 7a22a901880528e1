#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "subcurv/calculus.hpp"
#include "subcurv/util/grid.hpp"
#include "subcurv/util/linalg.hpp"

namespace subcurv {

/// Smooth vector field Σ components[k] ∂_k with expression coefficients.
struct VectorFieldExpr {
  std::vector<Expr> components;

  std::size_t dim() const { return components.size(); }
  /// X(f) = Σ X^k ∂_k f.
  Expr apply(const Expr& f) const {
    std::vector<Expr> terms;
    for (std::size_t k = 0; k < components.size(); ++k) {
      if (components[k].is_zero() || !f.depends_on(k)) continue;
      terms.push_back(components[k] * differentiate(f, k));
    }
    return Expr::sum(std::move(terms));
  }
  std::vector<double> at(std::span<const double> point) const {
    return Tape(components)(point);
  }
};

inline VectorFieldExpr operator*(const Expr& f, const VectorFieldExpr& x) {
  VectorFieldExpr out;
  for (const auto& c : x.components) out.components.push_back(f * c);
  return out;
}

inline VectorFieldExpr operator+(const VectorFieldExpr& a, const VectorFieldExpr& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("vector fields of different dimension");
  VectorFieldExpr out;
  for (std::size_t k = 0; k < a.dim(); ++k) out.components.push_back(a.components[k] + b.components[k]);
  return out;
}

inline VectorFieldExpr operator-(const VectorFieldExpr& a, const VectorFieldExpr& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("vector fields of different dimension");
  VectorFieldExpr out;
  for (std::size_t k = 0; k < a.dim(); ++k) out.components.push_back(a.components[k] - b.components[k]);
  return out;
}

/// Coordinate cometric g^{lk} = <dx^l, dx^k>*, volume density A with
/// dv = A dx^1 ∧ … ∧ dx^{m+1}, and optional horizontal frame.
struct SubriemannianStructure {
  std::string name;
  CoordSystem coords;
  std::vector<std::vector<Expr>> cometric;
  Expr density = constant(1);
  int degeneracy = 0;
  std::optional<std::vector<VectorFieldExpr>> frame_fields;
  Definitions definitions;  // names such as r2 or rho available to parse_expr

  std::size_t dim() const { return coords.size(); }

  Expr parse(std::string_view source) const { return parse_expr(source, coords, definitions); }

  /// Shape checks plus sampled PSD, positivity and frame-rank checks on a
  /// probe grid. Throws std::invalid_argument describing the first failure.
  void validate(const Box& probe, std::size_t per_axis = 5) const {
    const std::size_t n = dim();
    if (cometric.size() != n) throw std::invalid_argument("cometric has wrong row count");
    for (std::size_t l = 0; l < n; ++l) {
      if (cometric[l].size() != n) throw std::invalid_argument("cometric row has wrong length");
      for (std::size_t k = 0; k < l; ++k) {
        if (!(cometric[l][k] - cometric[k][l]).is_zero()) {
          throw std::invalid_argument("cometric is not symmetric");
        }
      }
    }
    if (frame_fields) {
      for (const auto& f : *frame_fields) {
        if (f.dim() != n) throw std::invalid_argument("frame field has wrong dimension");
      }
    }
    if (probe.dim() != n) throw std::invalid_argument("probe box has wrong dimension");

    std::vector<Expr> flat;
    for (const auto& row : cometric) flat.insert(flat.end(), row.begin(), row.end());
    Tape g(flat);
    Tape a(density);
    std::vector<Expr> frames_flat;
    if (frame_fields) {
      for (const auto& f : *frame_fields) {
        frames_flat.insert(frames_flat.end(), f.components.begin(), f.components.end());
      }
    }
    Tape fr(frames_flat);
    GridSpec grid = GridSpec::uniform(probe, per_axis);
    std::vector<double> work;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto x = grid.point(i);
      std::vector<double> gv = g(x);
      Matrix m(n, std::vector<double>(n));
      double scale = 1.0;
      for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t k = 0; k < n; ++k) m[l][k] = gv[l * n + k];
        scale = std::max(scale, std::abs(m[l][l]));
      }
      for (std::size_t s = 1; s <= n; ++s) {
        Matrix lead(s, std::vector<double>(s));
        for (std::size_t l = 0; l < s; ++l) {
          for (std::size_t k = 0; k < s; ++k) lead[l][k] = m[l][k];
        }
        if (determinant(lead) < -1e-10 * std::pow(scale, static_cast<double>(s))) {
          throw std::invalid_argument("cometric is not positive semidefinite at a probe point");
        }
      }
      if (!(a.scalar(x, work) > 0.0)) throw std::invalid_argument("volume density is not positive");
      if (frame_fields && !frame_fields->empty()) {
        std::vector<double> fv = fr(x);
        Matrix rows(frame_fields->size(), std::vector<double>(n));
        for (std::size_t r = 0; r < rows.size(); ++r) {
          for (std::size_t k = 0; k < n; ++k) rows[r][k] = fv[r * n + k];
        }
        auto expected = static_cast<std::size_t>(static_cast<int>(n) - degeneracy);
        if (numeric_rank(rows).rank != expected) {
          throw std::invalid_argument("frame fields do not span a rank " + std::to_string(expected) +
                                      " distribution at a probe point");
        }
      }
    }
  }
};

/// Defining function φ on a chart with a closed domain box.
struct ScalarField {
  Expr expr;
  CoordSystem coords;
  Box box;
};

}  // namespace subcurv
