#pragma once

#include <cmath>
#include <vector>

#include "subcurv/core/curvature.hpp"
#include "subcurv/util/grid.hpp"
#include "subcurv/util/linalg.hpp"
#include "subcurv/util/parallel.hpp"

namespace subcurv {

struct SingularCell {
  std::size_t grid_index = 0;
  std::vector<double> grid_point;
  std::vector<double> point;  // refined when `refined`, else the grid point
  double conorm = 0.0;        // |dφ|* at `point`
  double residual = 0.0;      // |∇(|dφ|*²)| at the last refinement iterate
  bool refined = false;
};

struct SingularScanResult {
  GridSpec grid;
  double eps_sing = kDefaultEpsSing;
  std::vector<SingularCell> cells;  // ordered by grid index

  double fraction() const {
    return grid.size() == 0 ? 0.0 : static_cast<double>(cells.size()) / static_cast<double>(grid.size());
  }
};

namespace detail {

/// Damped Newton (Levenberg–Marquardt) on Q = |dφ|*² restricted to the
/// non-degenerate axes of the box. Converged iterates must stay in the box.
struct SingularRefiner {
  SingularRefiner(const Expr& q, std::size_t dim) : dim(dim) {
    std::vector<Expr> outs{q};
    for (std::size_t i = 0; i < dim; ++i) outs.push_back(differentiate(q, i));
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) outs.push_back(differentiate(outs[1 + i], j));
    }
    tape = Tape(outs);
  }

  bool refine(std::vector<double>& x, const Box& box, double eps, double& residual) const {
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < dim; ++i) {
      if (box.intervals[i].second > box.intervals[i].first) free.push_back(i);
    }
    double mu = 1e-6;
    std::vector<double> out(tape.output_count());
    std::vector<double> work;
    for (int it = 0; it < 20; ++it) {
      tape.run(x, work, out);
      double q = out[0];
      double gnorm = 0.0;
      for (auto i : free) gnorm += out[1 + i] * out[1 + i];
      residual = std::sqrt(gnorm);
      if (std::sqrt(std::max(q, 0.0)) < 1e-3 * eps || residual < 1e-15) {
        return std::sqrt(std::max(q, 0.0)) < eps;
      }
      Matrix h(free.size(), std::vector<double>(free.size()));
      std::vector<double> rhs(free.size());
      for (std::size_t a = 0; a < free.size(); ++a) {
        rhs[a] = -out[1 + free[a]];
        for (std::size_t b = 0; b < free.size(); ++b) h[a][b] = out[1 + dim + free[a] * dim + free[b]];
        h[a][a] += mu * (1.0 + std::abs(h[a][a]));
      }
      auto step = solve(h, rhs);
      if (!step) return false;
      for (std::size_t a = 0; a < free.size(); ++a) x[free[a]] += (*step)[a];
      if (!box.contains(x)) return false;
    }
    tape.run(x, work, out);
    return std::sqrt(std::max(out[0], 0.0)) < eps;
  }

  std::size_t dim;
  Tape tape;
};

}  // namespace detail

/// Grid cells with |dφ|* < eps_sing, each refined toward a minimizer of
/// |dφ|*² when the iteration converges inside the box.
inline SingularScanResult singular_scan(const SubriemannianStructure& s, const ScalarField& phi,
                                        const GridSpec& grid, double eps_sing = eps_sing_from_env(),
                                        unsigned jobs = 1) {
  if (grid.dim() != s.dim()) throw DimensionMismatch("grid dimension differs from structure");
  auto dphi = gradient(phi.expr, s.dim());
  Expr q = cometric_pairing(s, dphi, dphi);
  Tape qt(q);
  detail::SingularRefiner refiner(q, s.dim());

  std::vector<std::optional<SingularCell>> slots(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    std::vector<double> work;
    auto x = grid.point(i);
    double c = std::sqrt(std::max(0.0, qt.scalar(x, work)));
    if (!(c < eps_sing)) return;
    SingularCell cell;
    cell.grid_index = i;
    cell.grid_point = x;
    cell.point = x;
    cell.conorm = c;
    std::vector<double> y = x;
    double residual = 0.0;
    if (refiner.refine(y, grid.box(), eps_sing, residual)) {
      double cy = std::sqrt(std::max(0.0, qt.scalar(y, work)));
      if (cy < eps_sing) {
        cell.point = y;
        cell.conorm = cy;
        cell.refined = true;
      }
    }
    cell.residual = residual;
    slots[i] = std::move(cell);
  });

  SingularScanResult r;
  r.grid = grid;
  r.eps_sing = eps_sing;
  for (auto& c : slots) {
    if (c) r.cells.push_back(std::move(*c));
  }
  return r;
}

}  // namespace subcurv
