#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "subcurv/calculus.hpp"
#include "subcurv/core/curvature.hpp"
#include "subcurv/heisenberg/operators.hpp"
#include "subcurv/heisenberg/structures.hpp"
#include "subcurv/smp/scenario.hpp"

namespace subcurv {

/// Curvature of one graph, evaluated at chart points.
struct GraphCurvature {
  Expr graph;           // w over the chart
  Expr conorm_squared;  // |dφ|*² of the ambient defining function, pulled back to the chart
  Tape graph_tape;
  Tape conorm_tape;
  std::function<double(std::span<const double>, std::vector<double>&)> curvature;

  double value(std::span<const double> x, std::vector<double>& work) const { return graph_tape.scalar(x, work); }
  double conorm(std::span<const double> x, std::vector<double>& work) const {
    return std::sqrt(std::max(0.0, conorm_tape.scalar(x, work)));
  }
};

/// Ties a scenario's chart to its ambient structure: which coordinate is
/// the graph direction, how chart points embed, and which operator gives
/// the curvature.
class GraphModel {
 public:
  explicit GraphModel(const ComparisonScenario& sc) : op_(sc.op), p_(sc.p), eps_(sc.tol.sing) {
    ambient_ = build_structure(sc.structure);
    const std::size_t d = ambient_.dim();
    const auto& sp = sc.structure;
    switch (op_) {
      case OperatorKind::generic: {
        std::vector<std::string> names(ambient_.coords.names().begin(), ambient_.coords.names().end() - 1);
        chart_ = chart_from(names);
        break;
      }
      case OperatorKind::graph_HF:
        if (sp.kind != "graph_F") throw ConfigError("operator graph_HF needs a graph_F structure");
        F_ = graph_F_components(sp);
        chart_ = chart_from({ambient_.coords.names().begin(), ambient_.coords.names().end() - 1});
        break;
      case OperatorKind::la_graph:
      case OperatorKind::intrinsic:
        if (sp.kind != "heisenberg") throw ConfigError("operator " + to_string(op_) + " needs a heisenberg structure");
        n_ = sp.n;
        chart_ = la_chart_coords(n_);
        break;
      case OperatorKind::radial_cylinder:
        if (sp.kind != "cylinder") throw ConfigError("operator radial_cylinder needs a cylinder structure");
        n_ = sp.n;
        chart_ = chart_from({ambient_.coords.names().begin(), ambient_.coords.names().end() - 1});
        break;
    }
    if (op_ != OperatorKind::generic && !(p_ == Rational{0})) {
      throw ConfigError("operator " + to_string(op_) + " is a mean curvature operator; p must be 0");
    }
    if (chart_.size() + 1 != d) throw ConfigError("chart dimension mismatch");
    if (sp.kind == "heisenberg" || sp.kind == "cylinder") {
      if (op_ == OperatorKind::generic || op_ == OperatorKind::radial_cylinder) {
        chart_defs_.emplace("r2", heisenberg_r2(sp.n));
      }
    }
  }

  const SubriemannianStructure& ambient() const { return ambient_; }
  const CoordSystem& chart() const { return chart_; }
  const Definitions& chart_definitions() const { return chart_defs_; }
  OperatorKind op() const { return op_; }
  std::size_t m() const { return chart_.size(); }

  Expr parse_graph(const std::string& src) const { return parse_expr(src, chart_, chart_defs_); }

  /// Ambient coordinates of the graph point over chart point x, as
  /// expressions in the chart coordinates.
  std::vector<Expr> embedding(const Expr& w) const {
    const std::size_t d = ambient_.dim();
    std::vector<Expr> e(d);
    if (op_ == OperatorKind::la_graph || op_ == OperatorKind::intrinsic) {
      // x¹ = w, x^k = η^k, z = τ ∓ η^{n+1} w
      e[0] = w;
      for (std::size_t k = 1; k + 1 < d; ++k) e[k] = variable(k - 1);
      Expr shift = variable(static_cast<std::size_t>(n_ - 1)) * w;
      e[d - 1] = op_ == OperatorKind::la_graph ? variable(d - 2) - shift : variable(d - 2) + shift;
      return e;
    }
    for (std::size_t k = 0; k + 1 < d; ++k) e[k] = variable(k);
    e[d - 1] = w;
    return e;
  }

  /// Defining function of the graph in ambient coordinates.
  Expr defining_function(const Expr& w) const {
    const std::size_t d = ambient_.dim();
    if (op_ == OperatorKind::la_graph || op_ == OperatorKind::intrinsic) {
      // w(x², …, x^{2n}, z ± x¹x^{n+1}) − x¹
      std::vector<Expr> sub(d - 1);
      for (std::size_t k = 1; k + 1 < d; ++k) sub[k - 1] = variable(k);
      Expr twist = variable(0) * variable(static_cast<std::size_t>(n_));
      sub[d - 2] = op_ == OperatorKind::la_graph ? variable(d - 1) + twist : variable(d - 1) - twist;
      return substitute(w, sub) - variable(0);
    }
    return w - variable(d - 1);
  }

  std::vector<double> embed(std::span<const double> x, double w) const {
    const std::size_t d = ambient_.dim();
    std::vector<double> q(d);
    if (op_ == OperatorKind::la_graph || op_ == OperatorKind::intrinsic) {
      q[0] = w;
      for (std::size_t k = 1; k + 1 < d; ++k) q[k] = x[k - 1];
      double shift = x[static_cast<std::size_t>(n_ - 1)] * w;
      q[d - 1] = op_ == OperatorKind::la_graph ? x[d - 2] - shift : x[d - 2] + shift;
      return q;
    }
    for (std::size_t k = 0; k + 1 < d; ++k) q[k] = x[k];
    q[d - 1] = w;
    return q;
  }

  std::vector<double> project(std::span<const double> q) const {
    const std::size_t d = ambient_.dim();
    std::vector<double> x(d - 1);
    if (op_ == OperatorKind::la_graph || op_ == OperatorKind::intrinsic) {
      for (std::size_t k = 1; k + 1 < d; ++k) x[k - 1] = q[k];
      double twist = q[0] * q[static_cast<std::size_t>(n_)];
      x[d - 2] = op_ == OperatorKind::la_graph ? q[d - 1] + twist : q[d - 1] - twist;
      return x;
    }
    for (std::size_t k = 0; k + 1 < d; ++k) x[k] = q[k];
    return x;
  }

  std::shared_ptr<const GraphCurvature> curvature(const Expr& w) const {
    auto g = std::make_shared<GraphCurvature>();
    g->graph = w;
    g->graph_tape = Tape(w);
    const Expr phi = defining_function(w);
    const auto emb = embedding(w);
    auto dphi = gradient(phi, ambient_.dim());
    g->conorm_squared = substitute(cometric_pairing(ambient_, dphi, dphi), emb);
    g->conorm_tape = Tape(g->conorm_squared);
    const double eps = eps_;
    switch (op_) {
      case OperatorKind::generic: {
        CurvatureEvaluator ev(ambient_, phi, p_, eps);
        auto tape = std::make_shared<Tape>(substitute(ev.curvature_expr(), emb));
        g->curvature = [tape](std::span<const double> x, std::vector<double>& work) {
          return tape->scalar(x, work);
        };
        break;
      }
      case OperatorKind::graph_HF: {
        auto hf = std::make_shared<GraphHFOperator>(F_, w, eps);
        g->curvature = [hf](std::span<const double> x, std::vector<double>& work) { return (*hf)(x, work); };
        break;
      }
      case OperatorKind::la_graph: {
        auto la = std::make_shared<LaGraphOperator>(n_, w, eps);
        g->curvature = [la](std::span<const double> x, std::vector<double>& work) { return (*la)(x, work); };
        break;
      }
      case OperatorKind::intrinsic: {
        auto in = std::make_shared<IntrinsicGraphOperator>(n_, w);
        g->curvature = [in](std::span<const double> x, std::vector<double>& work) { return (*in)(x, work); };
        break;
      }
      case OperatorKind::radial_cylinder: {
        std::vector<Expr> sub(chart_.size(), Expr{});
        sub[0] = variable(0);
        auto rad = std::make_shared<RadialCylinderOperator>(n_, substitute(w, sub), eps);
        g->curvature = [rad](std::span<const double> x, std::vector<double>&) {
          double r2 = 0.0;
          for (double c : x) r2 += c * c;
          return (*rad)(std::sqrt(r2));
        };
        break;
      }
    }
    return g;
  }

 private:
  static CoordSystem chart_from(std::vector<std::string> names) {
    if (names.size() < 2) throw ConfigError("graph charts need at least two coordinates");
    return CoordSystem(std::move(names));
  }

  OperatorKind op_;
  Rational p_;
  double eps_;
  int n_ = 1;
  SubriemannianStructure ambient_;
  CoordSystem chart_;
  Definitions chart_defs_;
  std::vector<Expr> F_;
};

}  // namespace subcurv
