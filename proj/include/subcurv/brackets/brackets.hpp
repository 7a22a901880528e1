#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "subcurv/calculus.hpp"
#include "subcurv/core/structure.hpp"
#include "subcurv/util/linalg.hpp"

namespace subcurv {

/// [X,Y]^l = Σ_k (X^k ∂_k Y^l − Y^k ∂_k X^l).
inline VectorFieldExpr lie_bracket(const VectorFieldExpr& x, const VectorFieldExpr& y) {
  if (x.dim() != y.dim()) throw DimensionMismatch("lie_bracket of fields with different dimension");
  VectorFieldExpr out;
  out.components.reserve(x.dim());
  for (std::size_t l = 0; l < x.dim(); ++l) out.components.push_back(x.apply(y.components[l]) - y.apply(x.components[l]));
  return out;
}

inline bool is_zero_field(const VectorFieldExpr& x) {
  return std::all_of(x.components.begin(), x.components.end(), [](const Expr& e) { return e.is_zero(); });
}

struct RankReport {
  std::vector<double> point;
  std::size_t rank = 0;
  std::size_t target = 0;  // rank sought (coordinate count unless restricted)
  std::size_t depth = 1;   // bracket length at which `rank` was first reached
  std::size_t words = 0;   // nonzero bracket words generated
  double tolerance = 0.0;  // absolute pivot threshold of the final rank test
  double rel_tolerance = 1e-9;
};

inline constexpr std::size_t kDefaultBracketDepth = 4;

/// Rank of the span of all right-nested words [X_{i1},[X_{i2},…,X_{ik}]],
/// k ≤ max_depth, evaluated at `point`. Words that simplify to zero are
/// dropped, and the search stops once `target` is reached (default: the
/// full dimension).
inline RankReport bracket_generate_rank(const std::vector<VectorFieldExpr>& fields,
                                        std::span<const double> point,
                                        std::size_t max_depth = kDefaultBracketDepth,
                                        std::size_t target = 0) {
  if (fields.empty()) throw std::invalid_argument("bracket_generate_rank needs at least one field");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  const std::size_t dim = fields.front().dim();
  if (target == 0 || target > dim) target = dim;

  RankReport rep;
  rep.point.assign(point.begin(), point.end());
  rep.target = target;
  Matrix rows;
  std::vector<VectorFieldExpr> level;
  auto add_words = [&](const std::vector<VectorFieldExpr>& words) {
    for (const auto& w : words) rows.push_back(w.at(point));
    rep.words += words.size();
    auto r = numeric_rank(rows, rep.rel_tolerance);
    rep.tolerance = r.threshold;
    return r.rank;
  };

  for (const auto& f : fields) {
    if (f.dim() != dim) throw DimensionMismatch("fields of different dimension");
    if (!is_zero_field(f)) level.push_back(f);
  }
  rep.rank = add_words(level);
  rep.depth = 1;
  for (std::size_t depth = 2; depth <= max_depth && rep.rank < target && !level.empty(); ++depth) {
    std::vector<VectorFieldExpr> next;
    for (const auto& x : fields) {
      for (const auto& w : level) {
        auto b = lie_bracket(x, w);
        if (is_zero_field(b)) continue;
        bool duplicate = std::any_of(next.begin(), next.end(), [&](const VectorFieldExpr& o) {
          for (std::size_t k = 0; k < dim; ++k) {
            if (o.components[k] != b.components[k]) return false;
          }
          return true;
        });
        if (!duplicate) next.push_back(std::move(b));
      }
    }
    std::size_t r = add_words(next);
    if (r > rep.rank) {
      rep.rank = r;
      rep.depth = depth;
    }
    level = std::move(next);
  }
  return rep;
}

/// X_ij = (E_jφ) E_i − (E_iφ) E_j for i < j: horizontal fields tangent to
/// the level sets of φ.
inline std::vector<VectorFieldExpr> tangent_distribution_fields(const SubriemannianStructure& s,
                                                                const Expr& phi) {
  if (!s.frame_fields || s.frame_fields->empty()) {
    throw std::invalid_argument("structure '" + s.name + "' has no frame fields");
  }
  const auto& e = *s.frame_fields;
  std::vector<Expr> ephi;
  for (const auto& f : e) ephi.push_back(f.apply(phi));
  std::vector<VectorFieldExpr> out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) out.push_back(ephi[j] * e[i] - ephi[i] * e[j]);
  }
  return out;
}

/// M_kj = ∂_k F_j − ∂_j F_k, the coefficient matrix of d(Σ F_j dx^j).
inline std::vector<std::vector<Expr>> curl_matrix(const std::vector<Expr>& F) {
  const std::size_t m = F.size();
  std::vector<std::vector<Expr>> M(m, std::vector<Expr>(m));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j != k) M[k][j] = differentiate(F[j], k) - differentiate(F[k], j);
    }
  }
  return M;
}

/// Numeric rank of the skew matrix M at `point`, or of BᵀMB when a
/// restriction basis B (one column per basis vector, given as fields) is
/// supplied.
inline std::size_t two_form_rank(const std::vector<std::vector<Expr>>& M, std::span<const double> point,
                                 const std::vector<VectorFieldExpr>* basis = nullptr) {
  const std::size_t n = M.size();
  for (const auto& row : M) {
    if (row.size() != n) throw DimensionMismatch("two-form matrix is not square");
  }
  std::vector<Expr> flat;
  for (const auto& row : M) flat.insert(flat.end(), row.begin(), row.end());
  std::vector<double> mv = Tape(flat)(point);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      if ((M[k][j] + M[j][k]).is_zero()) continue;
      double a = mv[k * n + j];
      double b = mv[j * n + k];
      if (std::abs(a + b) > 1e-12 * (1.0 + std::abs(a) + std::abs(b))) {
        throw std::invalid_argument("two-form matrix is not skew-symmetric");
      }
    }
  }
  Matrix m(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) m[k][j] = mv[k * n + j];
  }
  if (basis) {
    Matrix b;
    for (const auto& f : *basis) {
      if (f.dim() != n) throw DimensionMismatch("restriction basis has wrong dimension");
      b.push_back(f.at(point));
    }
    Matrix r(b.size(), std::vector<double>(b.size(), 0.0));
    for (std::size_t a = 0; a < b.size(); ++a) {
      for (std::size_t c = 0; c < b.size(); ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          for (std::size_t j = 0; j < n; ++j) s += b[a][k] * m[k][j] * b[c][j];
        }
        r[a][c] = s;
      }
    }
    m = std::move(r);
  }
  return numeric_rank(m).rank;
}

struct WTensorReport {
  bool independent = true;
  std::size_t rank = 0;       // rank of the l × k(k−1)/2 coefficient matrix
  std::size_t l = 0;
  std::size_t k = 0;
  bool dimension_count = true;  // k(k−1)/2 ≥ l
  Matrix w;                   // w[α][pair index], pairs (i<j) in lexicographic order
};

/// W^α_ij = θ^α([X_i, X_j]) at `point`, and whether the l matrices W^α are
/// linearly independent.
inline WTensorReport w_tensor_independence(const std::vector<VectorFieldExpr>& X,
                                           const std::vector<std::vector<Expr>>& theta,
                                           const std::vector<VectorFieldExpr>& T,
                                           std::span<const double> point) {
  WTensorReport rep;
  rep.k = X.size();
  rep.l = theta.size();
  const std::size_t pairs = rep.k * (rep.k - (rep.k > 0 ? 1 : 0)) / 2;
  rep.dimension_count = pairs >= rep.l;
  if (rep.l == 0) return rep;
  if (T.size() != rep.l) throw std::invalid_argument("frame inconsistency: need one complement field per coform");
  const std::size_t dim = point.size();
  Matrix frame;
  for (const auto& f : X) frame.push_back(f.at(point));
  for (const auto& f : T) frame.push_back(f.at(point));
  for (const auto& row : frame) {
    if (row.size() != dim) throw DimensionMismatch("field dimension differs from point");
  }
  if (numeric_rank(frame).rank != rep.k + rep.l) {
    throw std::invalid_argument("frame inconsistency: fields and complements are not independent");
  }
  auto pairing = [](const std::vector<Expr>& th, const VectorFieldExpr& f) {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < th.size(); ++i) terms.push_back(th[i] * f.components[i]);
    return Expr::sum(std::move(terms));
  };
  for (const auto& th : theta) {
    if (th.size() != dim) throw DimensionMismatch("coform dimension differs from point");
    for (const auto& f : X) {
      Expr v = pairing(th, f);
      if (!v.is_zero() && std::abs(evaluate(v, point)) > 1e-12) {
        throw std::invalid_argument("frame inconsistency: a coform does not annihilate the fields");
      }
    }
  }
  rep.w.assign(rep.l, std::vector<double>(pairs, 0.0));
  std::size_t p = 0;
  for (std::size_t i = 0; i < rep.k; ++i) {
    for (std::size_t j = i + 1; j < rep.k; ++j, ++p) {
      auto b = lie_bracket(X[i], X[j]);
      for (std::size_t a = 0; a < rep.l; ++a) rep.w[a][p] = evaluate(pairing(theta[a], b), point);
    }
  }
  rep.rank = numeric_rank(rep.w).rank;
  rep.independent = rep.rank == rep.l;
  return rep;
}

}  // namespace subcurv
