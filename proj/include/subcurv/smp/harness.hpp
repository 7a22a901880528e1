#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "subcurv/brackets/brackets.hpp"
#include "subcurv/core/singular.hpp"
#include "subcurv/smp/graph_model.hpp"
#include "subcurv/smp/integrate.hpp"
#include "subcurv/smp/scenario.hpp"
#include "subcurv/util/parallel.hpp"

namespace subcurv {

inline constexpr std::size_t kTouchSampleCap = 16;
inline constexpr std::size_t kNeighborhoodRadius = 5;

struct PointRow {
  std::vector<double> x;
  double u = 0.0;
  double v = 0.0;
  double v_minus_u = 0.0;
  std::optional<double> H_u;
  std::optional<double> H_v;
  bool singular_u = false;
  bool singular_v = false;
};

struct OrderingVerdict {
  bool holds = false;
  bool swapped = false;
  double min_v_minus_u = 0.0;
  std::vector<double> argmin;
};

struct TouchPoint {
  std::size_t index = 0;
  std::vector<double> point;  // refined minimizer of v − u, or the grid point
  double v_minus_u = 0.0;
  bool singular_u = false;
  bool refined = false;
};

struct GapVerdict {
  std::optional<double> max;  // max of H(v) − H(u) over points nonsingular for both
  std::vector<double> argmax;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

struct SingularEntry {
  std::size_t index = 0;
  std::vector<double> point;
  double conorm = 0.0;
  bool refined = false;
};

struct RankVerdict {
  std::size_t rank = 0;
  std::size_t target = 0;
  std::size_t depth = 1;
  std::size_t words = 0;
  double tolerance = 0.0;
  std::size_t checked_points = 0;
  std::vector<double> point;  // chart point where the minimum rank was seen
};

struct PropagationEntry {
  std::vector<double> start;  // chart point
  std::size_t field = 0;
  int direction = 1;
  std::size_t steps = 0;  // steps kept inside the box
  double max_abs_v_minus_u = 0.0;
  std::optional<std::size_t> first_violation_step;
  bool clipped = false;
  bool failed = false;
  bool holds = true;
};

struct ScenarioReport {
  std::string name;
  std::string description;
  std::string structure;
  std::string op;
  std::string p;
  std::string u;
  std::string v;
  std::vector<std::string> chart;
  Box box;
  std::vector<std::size_t> counts;
  Tolerances tol;
  double T = 0.5;
  double step = 1e-3;

  OrderingVerdict ordering;
  std::vector<TouchPoint> touching;
  std::size_t touching_nonsingular = 0;
  std::optional<double> neighborhood_max;
  GapVerdict gap;
  double singular_fraction_u = 0.0;
  double singular_fraction_v = 0.0;
  std::vector<SingularEntry> singular_u;
  std::vector<SingularEntry> singular_v;
  std::optional<RankVerdict> rank;
  std::vector<PropagationEntry> propagation;

  std::string classification;
  std::vector<std::string> notes;

  std::size_t touch_sample_cap = kTouchSampleCap;
  std::size_t neighborhood_radius = kNeighborhoodRadius;
  std::size_t rank_depth = kDefaultBracketDepth;
  double pivot_rel_tol = 1e-9;
};

struct Classification {
  std::string label;
  std::vector<std::string> notes;
};

/// Pure function of the recorded measurements.
inline Classification classify(const ScenarioReport& r) {
  if (!r.ordering.holds) return {"hypothesis-violated", {"ordering fails in both orientations"}};
  if (r.touching.empty()) return {"inconclusive", {"no touching points"}};
  if (r.gap.evaluated == 0 || !r.gap.max) return {"inconclusive", {"no grid point is nonsingular for both graphs"}};
  if (*r.gap.max > r.tol.H) return {"hypothesis-violated", {"curvature comparison H(v) <= H(u) fails"}};
  if (r.neighborhood_max && *r.neighborhood_max <= r.tol.touch) return {"coincide-near-touching", {}};
  if (r.touching_nonsingular == 0) {
    return {"smp-consistent", {"singular-touch: curvature comparison verified on annulus"}};
  }
  std::string label = "counterexample-detected";
  if (r.rank && r.rank->rank < r.rank->target) label += ";rank-condition-failed";
  return {label, {}};
}

namespace detail {

/// Damped Newton descent on f over the non-degenerate axes of `box`.
/// Returns true and updates x when the iteration settles inside the box
/// without increasing f.
inline bool refine_minimum(const Tape& tape, std::size_t dim, std::vector<double>& x, const Box& box) {
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < dim; ++i) {
    if (box.intervals[i].second > box.intervals[i].first) free.push_back(i);
  }
  std::vector<double> out(tape.output_count());
  std::vector<double> work;
  tape.run(x, work, out);
  const double f0 = out[0];
  std::vector<double> y = x;
  for (int it = 0; it < 20; ++it) {
    double g = 0.0;
    for (auto i : free) g += out[1 + i] * out[1 + i];
    if (std::sqrt(g) < 1e-14) break;
    Matrix h(free.size(), std::vector<double>(free.size()));
    std::vector<double> rhs(free.size());
    for (std::size_t a = 0; a < free.size(); ++a) {
      rhs[a] = -out[1 + free[a]];
      for (std::size_t b = 0; b < free.size(); ++b) h[a][b] = out[1 + dim + free[a] * dim + free[b]];
      h[a][a] += 1e-8 * (1.0 + std::abs(h[a][a]));
    }
    auto stepv = solve(h, rhs);
    if (!stepv) return false;
    double len = 0.0;
    for (std::size_t a = 0; a < free.size(); ++a) {
      y[free[a]] += (*stepv)[a];
      len += (*stepv)[a] * (*stepv)[a];
    }
    if (!box.contains(y)) return false;
    tape.run(y, work, out);
    if (std::sqrt(len) < 1e-15) break;
  }
  tape.run(y, work, out);
  if (!(out[0] <= f0)) return false;
  x = std::move(y);
  return true;
}

inline Tape value_gradient_hessian(const Expr& f, std::size_t dim) {
  std::vector<Expr> outs{f};
  for (std::size_t i = 0; i < dim; ++i) outs.push_back(differentiate(f, i));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) outs.push_back(differentiate(outs[1 + i], j));
  }
  return Tape(outs);
}

/// Indices of up to `cap` items spread evenly over [0, n), always
/// containing `must`.
inline std::vector<std::size_t> spread_sample(std::size_t n, std::size_t cap, std::size_t must) {
  std::vector<std::size_t> idx;
  if (n <= cap) {
    for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    return idx;
  }
  for (std::size_t k = 0; k < cap; ++k) idx.push_back(k * (n - 1) / (cap - 1));
  if (std::find(idx.begin(), idx.end(), must) == idx.end()) {
    // replace the nearest sample so the count stays at `cap`
    auto nearest = std::min_element(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      auto da = a > must ? a - must : must - a;
      auto db = b > must ? b - must : must - b;
      return da < db;
    });
    *nearest = must;
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

}  // namespace detail

/// Samples both graphs and their curvatures on the grid. Curvatures are
/// evaluated only where |dφ|* ≥ eps_sing.
inline std::vector<PointRow> measure_grid(const GraphCurvature& gu, const GraphCurvature& gv, const GridSpec& grid,
                                          double eps_sing, unsigned jobs = 1) {
  std::vector<PointRow> rows(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    std::vector<double> work;
    PointRow row;
    row.x = grid.point(i);
    row.u = gu.value(row.x, work);
    row.v = gv.value(row.x, work);
    row.v_minus_u = row.v - row.u;
    auto curv = [&](const GraphCurvature& g, bool& singular) -> std::optional<double> {
      singular = g.conorm(row.x, work) < eps_sing;
      if (singular) return std::nullopt;
      try {
        return g.curvature(row.x, work);
      } catch (const EvaluationError&) {
        return std::nullopt;
      }
    };
    row.H_u = curv(gu, row.singular_u);
    row.H_v = curv(gv, row.singular_v);
    rows[i] = std::move(row);
  });
  return rows;
}

/// Max of H(v) − H(u) over rows where both curvatures are available.
inline GapVerdict curvature_gap(const std::vector<PointRow>& rows) {
  GapVerdict g;
  for (const auto& r : rows) {
    if (!r.H_u || !r.H_v) {
      ++g.skipped;
      continue;
    }
    ++g.evaluated;
    double d = *r.H_v - *r.H_u;
    if (!g.max || d > *g.max) {
      g.max = d;
      g.argmax = r.x;
    }
  }
  return g;
}

inline void swap_roles(std::vector<PointRow>& rows) {
  for (auto& r : rows) {
    std::swap(r.u, r.v);
    std::swap(r.H_u, r.H_v);
    std::swap(r.singular_u, r.singular_v);
    r.v_minus_u = r.v - r.u;
  }
}

/// Grid points with |v − u| ≤ eps_touch, each refined by descending v − u.
inline std::vector<TouchPoint> touching_set(const std::vector<PointRow>& rows, const GridSpec& grid, const Expr& gap,
                                            double eps_touch, unsigned jobs = 1) {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::abs(rows[i].v_minus_u) <= eps_touch) hits.push_back(i);
  }
  Tape tape = detail::value_gradient_hessian(gap, grid.dim());
  Tape value(gap);
  std::vector<TouchPoint> out(hits.size());
  parallel_for(hits.size(), jobs, [&](std::size_t k) {
    const auto& row = rows[hits[k]];
    TouchPoint t;
    t.index = hits[k];
    t.point = row.x;
    t.v_minus_u = row.v_minus_u;
    t.singular_u = row.singular_u;
    std::vector<double> y = row.x;
    if (detail::refine_minimum(tape, grid.dim(), y, grid.box())) {
      std::vector<double> work;
      double g = value.scalar(y, work);
      if (std::abs(g) <= eps_touch) {
        t.point = std::move(y);
        t.v_minus_u = g;
        t.refined = true;
      }
    }
    out[k] = std::move(t);
  });
  return out;
}

/// Largest |v − u| over grid balls of `radius` cells around each touching
/// point.
inline std::optional<double> neighborhood_max(const std::vector<PointRow>& rows, const GridSpec& grid,
                                              const std::vector<TouchPoint>& touching,
                                              std::size_t radius = kNeighborhoodRadius) {
  if (touching.empty()) return std::nullopt;
  std::vector<std::size_t> free;
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    if (grid.counts()[a] > 1) free.push_back(a);
  }
  const auto r = static_cast<long>(radius);
  double best = 0.0;
  for (const auto& t : touching) {
    auto base = grid.multi_index(t.index);
    std::vector<long> off(free.size(), -r);
    for (;;) {
      long d2 = 0;
      for (auto o : off) d2 += o * o;
      if (d2 <= r * r) {
        auto idx = base;
        bool ok = true;
        for (std::size_t a = 0; a < free.size(); ++a) {
          long c = static_cast<long>(base[free[a]]) + off[a];
          if (c < 0 || c >= static_cast<long>(grid.counts()[free[a]])) {
            ok = false;
            break;
          }
          idx[free[a]] = static_cast<std::size_t>(c);
        }
        if (ok) best = std::max(best, std::abs(rows[grid.flat_index(idx)].v_minus_u));
      }
      std::size_t a = 0;
      while (a < off.size() && ++off[a] > r) off[a++] = -r;
      if (a == off.size()) break;
    }
  }
  return best;
}

/// Chart-level singular cells of one graph, refined on |dφ|*².
inline std::vector<SingularEntry> singular_cells(const GraphCurvature& g, const std::vector<PointRow>& rows,
                                                 bool use_v, const GridSpec& grid, double eps_sing,
                                                 unsigned jobs = 1) {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (use_v ? rows[i].singular_v : rows[i].singular_u) hits.push_back(i);
  }
  detail::SingularRefiner refiner(g.conorm_squared, grid.dim());
  std::vector<SingularEntry> out(hits.size());
  parallel_for(hits.size(), jobs, [&](std::size_t k) {
    std::vector<double> work;
    SingularEntry e;
    e.index = hits[k];
    e.point = rows[hits[k]].x;
    e.conorm = g.conorm(e.point, work);
    std::vector<double> y = e.point;
    double residual = 0.0;
    if (refiner.refine(y, grid.box(), eps_sing, residual)) {
      double c = g.conorm(y, work);
      if (c < eps_sing) {
        e.point = std::move(y);
        e.conorm = c;
        e.refined = true;
      }
    }
    out[k] = std::move(e);
  });
  return out;
}

/// Integrates each field from the embedded start point in both directions
/// and records the largest |v − u| seen on the chart before leaving `box`.
inline std::vector<PropagationEntry> propagate_max(const GraphModel& model, const Expr& u, const Expr& v,
                                                   const std::vector<double>& start,
                                                   const std::vector<VectorFieldExpr>& fields, double T,
                                                   double step, double eps_touch, const Box& box,
                                                   unsigned jobs = 1) {
  Tape ut(u);
  Tape vt(v);
  std::vector<PropagationEntry> out(2 * fields.size());
  parallel_for(out.size(), jobs, [&](std::size_t k) {
    std::vector<double> work;
    PropagationEntry e;
    e.start = start;
    e.field = k / 2;
    e.direction = k % 2 == 0 ? 1 : -1;
    auto q0 = model.embed(start, ut.scalar(start, work));
    auto inside = [&](const std::vector<double>& q) { return box.contains(model.project(q), 1e-12); };
    auto tr = integrate_field(fields[e.field], q0, e.direction * T, step, inside);
    e.clipped = tr.clipped;
    e.failed = tr.failed;
    for (std::size_t s = 0; s < tr.points.size(); ++s) {
      auto x = model.project(tr.points[s]);
      double gap = std::abs(vt.scalar(x, work) - ut.scalar(x, work));
      e.max_abs_v_minus_u = std::max(e.max_abs_v_minus_u, gap);
      if (gap > eps_touch && !e.first_violation_step) e.first_violation_step = s;
    }
    e.steps = tr.points.empty() ? 0 : tr.points.size() - 1;
    e.holds = !e.first_violation_step && !e.failed;
    out[k] = std::move(e);
  });
  return out;
}

/// Weak-form residual |∫ N_F(u)·∇f + f H_F(u)| / (∫|f| + 1) by the
/// tensor-product midpoint rule with `cells` cells per axis.
inline double variation_check(const std::vector<Expr>& F, const Expr& u, const Expr& f, const Box& box,
                              std::size_t cells) {
  const std::size_t m = F.size();
  if (box.dim() != m) throw DimensionMismatch("box dimension differs from F");
  if (cells == 0) throw std::invalid_argument("need at least one quadrature cell");
  Tape ft(f);
  std::vector<double> work;
  // boundary check on a lattice of every face
  GridSpec probe(box, std::vector<std::size_t>(m, cells + 1));
  for (std::size_t i = 0; i < probe.size(); ++i) {
    auto idx = probe.multi_index(i);
    bool on_face = std::any_of(idx.begin(), idx.end(), [&](std::size_t c) { return c == 0 || c == cells; });
    if (on_face && std::abs(ft.scalar(probe.point(i), work)) > 1e-12) {
      throw std::invalid_argument("test function does not vanish on the box boundary");
    }
  }
  GraphHFOperator op(F, u);
  std::vector<Expr> grad_f = gradient(f, m);
  Tape gft(grad_f);
  Tape nt(op.normal_expr());
  double cell_volume = 1.0;
  std::vector<double> h(m);
  for (std::size_t a = 0; a < m; ++a) {
    h[a] = (box.intervals[a].second - box.intervals[a].first) / static_cast<double>(cells);
    cell_volume *= h[a];
  }
  std::size_t total = 1;
  for (std::size_t a = 0; a < m; ++a) total *= cells;
  double residual = 0.0;
  double mass = 0.0;
  std::vector<double> x(m);
  std::vector<double> gf(m);
  std::vector<double> nv(m);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    for (std::size_t a = m; a-- > 0;) {
      x[a] = box.intervals[a].first + (static_cast<double>(rest % cells) + 0.5) * h[a];
      rest /= cells;
    }
    double fv = ft.scalar(x, work);
    if (fv == 0.0) {
      bool flat = true;
      gft.run(x, work, gf);
      for (double g : gf) flat = flat && g == 0.0;
      if (flat) continue;
    }
    double hv = op(x, work);  // throws SingularPoint inside supp f
    gft.run(x, work, gf);
    nt.run(x, work, nv);
    double dot = 0.0;
    for (std::size_t a = 0; a < m; ++a) dot += nv[a] * gf[a];
    residual += (dot + fv * hv) * cell_volume;
    mass += std::abs(fv) * cell_volume;
  }
  return std::abs(residual) / (mass + 1.0);
}

/// Runs every measurement of a scenario and classifies it. Results do not
/// depend on `jobs`.
inline ScenarioReport run_scenario(const ComparisonScenario& sc, unsigned jobs = 1,
                                   std::vector<PointRow>* table = nullptr) {
  GraphModel model(sc);
  if (sc.p < Rational{0}) throw ConfigError("p must be >= 0");
  if (sc.box.dim() != model.m()) {
    throw ConfigError("box has " + std::to_string(sc.box.dim()) + " intervals, chart has " +
                      std::to_string(model.m()) + " coordinates");
  }
  GridSpec grid = [&] {
    try {
      return sc.grid_spec();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  Expr u = model.parse_graph(sc.u);
  Expr v = model.parse_graph(sc.v);

  if (sc.op == OperatorKind::radial_cylinder) {
    std::vector<Expr> sub(model.m(), Expr{});
    sub[0] = variable(0);
    for (const Expr* w : {&u, &v}) {
      Tape full(*w);
      Tape radial(substitute(*w, sub));
      std::vector<double> work;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        auto x = grid.point(i);
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        const double r[1] = {std::sqrt(r2)};
        double a = full.scalar(x, work);
        double b = radial.scalar(r, work);
        if (std::abs(a - b) > 1e-10 * (1.0 + std::abs(a))) {
          throw ConfigError("radial_cylinder needs radially symmetric graphs");
        }
      }
    }
  }

  ScenarioReport rep;
  rep.name = sc.name;
  rep.description = sc.description;
  rep.structure = sc.structure.label();
  rep.op = to_string(sc.op);
  rep.p = sc.p.to_string();
  rep.u = sc.u;
  rep.v = sc.v;
  rep.chart = model.chart().names();
  rep.box = sc.box;
  rep.counts = sc.grid;
  rep.tol = sc.tol;
  rep.T = sc.T;
  rep.step = sc.step;

  auto gu = model.curvature(u);
  auto gv = model.curvature(v);
  auto rows = measure_grid(*gu, *gv, grid, sc.tol.sing, jobs);

  auto min_of = [&](bool flipped) {
    std::size_t arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double d = flipped ? -rows[i].v_minus_u : rows[i].v_minus_u;
      if (d < best) {
        best = d;
        arg = i;
      }
    }
    return std::pair{best, arg};
  };
  auto [min_vu, arg_vu] = min_of(false);
  auto [min_uv, arg_uv] = min_of(true);
  if (min_vu >= -sc.tol.order) {
    rep.ordering = {true, false, min_vu, rows[arg_vu].x};
  } else if (min_uv >= -sc.tol.order) {
    rep.ordering = {true, true, min_uv, rows[arg_uv].x};
    swap_roles(rows);
    std::swap(u, v);
    std::swap(gu, gv);
  } else {
    rep.ordering = {false, false, min_vu, rows[arg_vu].x};
  }

  rep.touching = touching_set(rows, grid, v - u, sc.tol.touch, jobs);
  for (const auto& t : rep.touching) rep.touching_nonsingular += t.singular_u ? 0 : 1;
  rep.neighborhood_max = neighborhood_max(rows, grid, rep.touching);
  rep.gap = curvature_gap(rows);
  rep.singular_u = singular_cells(*gu, rows, false, grid, sc.tol.sing, jobs);
  rep.singular_v = singular_cells(*gv, rows, true, grid, sc.tol.sing, jobs);
  rep.singular_fraction_u = static_cast<double>(rep.singular_u.size()) / static_cast<double>(grid.size());
  rep.singular_fraction_v = static_cast<double>(rep.singular_v.size()) / static_cast<double>(grid.size());

  // rank and propagation on an even sample of nonsingular touching points
  std::vector<std::size_t> nonsingular;
  std::size_t best = 0;
  for (std::size_t k = 0; k < rep.touching.size(); ++k) {
    if (rep.touching[k].singular_u) continue;
    if (nonsingular.empty() || rep.touching[k].v_minus_u < rep.touching[best].v_minus_u) best = k;
    nonsingular.push_back(k);
  }
  const auto& amb = model.ambient();
  if (!nonsingular.empty() && amb.frame_fields && !amb.frame_fields->empty()) {
    auto pos = static_cast<std::size_t>(std::find(nonsingular.begin(), nonsingular.end(), best) - nonsingular.begin());
    auto picks = detail::spread_sample(nonsingular.size(), kTouchSampleCap, pos);
    auto fields = tangent_distribution_fields(amb, model.defining_function(u));
    Tape ut(u);
    std::vector<double> work;
    std::vector<std::optional<RankReport>> ranks(picks.size());
    parallel_for(picks.size(), jobs, [&](std::size_t i) {
      std::vector<double> w;
      const auto& x = rep.touching[nonsingular[picks[i]]].point;
      auto q = model.embed(x, ut.scalar(x, w));
      ranks[i] = bracket_generate_rank(fields, q, kDefaultBracketDepth, model.m());
    });
    for (std::size_t i = 0; i < picks.size(); ++i) {
      const auto& rr = *ranks[i];
      if (!rep.rank || rr.rank < rep.rank->rank) {
        rep.rank = RankVerdict{rr.rank, rr.target, rr.depth, rr.words, rr.tolerance, 0,
                               rep.touching[nonsingular[picks[i]]].point};
      }
    }
    rep.rank->checked_points = picks.size();
    for (auto i : picks) {
      auto entries = propagate_max(model, u, v, rep.touching[nonsingular[i]].point, fields, sc.T, sc.step,
                                   sc.tol.touch, sc.box, jobs);
      rep.propagation.insert(rep.propagation.end(), entries.begin(), entries.end());
    }
  }

  auto cls = classify(rep);
  rep.classification = cls.label;
  rep.notes = cls.notes;
  if (table) *table = std::move(rows);
  return rep;
}

}  // namespace subcurv
