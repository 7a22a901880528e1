#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace subcurv {

using Matrix = std::vector<std::vector<double>>;

struct RankResult {
  std::size_t rank = 0;
  double threshold = 0.0;  // absolute pivot cutoff actually applied
};

/// Row rank by Gaussian elimination with full pivoting. Pivots at or below
/// rel_tol times the largest initial row norm count as zero.
inline RankResult numeric_rank(Matrix rows, double rel_tol = 1e-9) {
  RankResult out;
  double scale = 0.0;
  for (const auto& r : rows) {
    double s = 0.0;
    for (double v : r) s += v * v;
    scale = std::max(scale, std::sqrt(s));
  }
  out.threshold = rel_tol * scale;
  if (rows.empty() || scale == 0.0) return out;
  std::size_t cols = rows.front().size();
  std::size_t r = 0;
  std::vector<bool> used(cols, false);
  while (r < rows.size()) {
    std::size_t pi = r;
    std::size_t pj = cols;
    double best = 0.0;
    for (std::size_t i = r; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        if (!used[j] && std::abs(rows[i][j]) > best) {
          best = std::abs(rows[i][j]);
          pi = i;
          pj = j;
        }
      }
    }
    if (pj == cols || best <= out.threshold) break;
    std::swap(rows[r], rows[pi]);
    used[pj] = true;
    for (std::size_t i = r + 1; i < rows.size(); ++i) {
      double f = rows[i][pj] / rows[r][pj];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) rows[i][j] -= f * rows[r][j];
      rows[i][pj] = 0.0;
    }
    ++r;
  }
  out.rank = r;
  return out;
}

/// Solves A x = b with partial pivoting; nullopt when A is numerically
/// singular.
inline std::optional<std::vector<double>> solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i) {
      if (std::abs(a[i][c]) > std::abs(a[p][c])) p = i;
    }
    if (std::abs(a[p][c]) < 1e-300) return std::nullopt;
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t i = c + 1; i < n; ++i) {
      double f = a[i][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
      b[i] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

inline double determinant(Matrix a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i) {
      if (std::abs(a[i][c]) > std::abs(a[p][c])) p = i;
    }
    if (a[p][c] == 0.0) return 0.0;
    if (p != c) {
      std::swap(a[c], a[p]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      double f = a[i][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return det;
}

}  // namespace subcurv
