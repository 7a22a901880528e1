#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subcurv/calculus.hpp"
#include "subcurv/core/curvature.hpp"
#include "subcurv/heisenberg/structures.hpp"
#include "subcurv/util/grid.hpp"

namespace subcurv {

/// Buildable description of an ambient structure. Expressions stay as
/// source text so that specs serialize back to config files verbatim.
struct StructureSpec {
  std::string kind = "heisenberg";  // heisenberg | cylinder | graph_F | custom
  int n = 1;                        // heisenberg, cylinder
  int m = 2;                        // graph_F
  std::vector<std::string> F;       // graph_F; empty means the default F
  // custom
  std::vector<std::string> coords;
  std::map<std::pair<std::size_t, std::size_t>, std::string> cometric;  // l <= k entries, others 0
  std::string density = "1";
  int degeneracy = 0;
  std::vector<std::vector<std::string>> frames;

  std::string label() const {
    if (kind == "heisenberg" || kind == "cylinder") return kind + "(" + std::to_string(n) + ")";
    if (kind == "graph_F") return "graph_F(" + std::to_string(m) + ")";
    return "custom(" + std::to_string(coords.size()) + ")";
  }
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<Expr> graph_F_components(const StructureSpec& spec) {
  if (spec.m < 2) throw ConfigError("graph_F needs m >= 2");
  if (spec.F.empty()) {
    if (spec.m % 2 != 0) throw ConfigError("graph_F with odd m needs explicit F components");
    return default_F(spec.m);
  }
  if (spec.F.size() != static_cast<std::size_t>(spec.m)) {
    throw ConfigError("graph_F needs " + std::to_string(spec.m) + " F components, got " +
                      std::to_string(spec.F.size()));
  }
  CoordSystem cs = graph_coords(spec.m);
  std::vector<Expr> F;
  for (const auto& s : spec.F) F.push_back(parse_expr(s, cs));
  return F;
}

inline SubriemannianStructure build_structure(const StructureSpec& spec) {
  if (spec.kind == "heisenberg") {
    if (spec.n < 1 || spec.n > 4) throw ConfigError("heisenberg n must be in 1..4");
    return standard_structure(spec.n);
  }
  if (spec.kind == "cylinder") {
    if (spec.n < 1 || spec.n > 4) throw ConfigError("cylinder n must be in 1..4");
    return cylinder_structure(spec.n);
  }
  if (spec.kind == "graph_F") return theoremF_structure(graph_F_components(spec), spec.m);
  if (spec.kind == "custom") {
    SubriemannianStructure s;
    s.name = spec.label();
    try {
      s.coords = CoordSystem(spec.coords);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    const std::size_t d = s.dim();
    s.cometric.assign(d, std::vector<Expr>(d));
    for (const auto& [lk, src] : spec.cometric) {
      auto [l, k] = lk;
      if (l >= d || k >= d) throw ConfigError("cometric entry index out of range");
      Expr e = parse_expr(src, s.coords);
      s.cometric[l][k] = e;
      s.cometric[k][l] = e;
    }
    s.density = parse_expr(spec.density, s.coords);
    s.degeneracy = spec.degeneracy;
    if (!spec.frames.empty()) {
      std::vector<VectorFieldExpr> frames;
      for (const auto& f : spec.frames) {
        if (f.size() != d) throw ConfigError("frame field needs one component per coordinate");
        VectorFieldExpr v;
        for (const auto& c : f) v.components.push_back(parse_expr(c, s.coords));
        frames.push_back(std::move(v));
      }
      s.frame_fields = std::move(frames);
    }
    return s;
  }
  throw ConfigError("unknown structure kind '" + spec.kind + "'");
}

enum class OperatorKind { generic, graph_HF, intrinsic, la_graph, radial_cylinder };

inline std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::generic:
      return "generic";
    case OperatorKind::graph_HF:
      return "graph_HF";
    case OperatorKind::intrinsic:
      return "intrinsic";
    case OperatorKind::la_graph:
      return "la_graph";
    case OperatorKind::radial_cylinder:
      return "radial_cylinder";
  }
  return "generic";
}

inline OperatorKind operator_from_string(const std::string& s) {
  for (auto k : {OperatorKind::generic, OperatorKind::graph_HF, OperatorKind::intrinsic, OperatorKind::la_graph,
                 OperatorKind::radial_cylinder}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown operator '" + s + "'");
}

struct Tolerances {
  double touch = 1e-6;
  double order = 1e-9;
  double H = 1e-7;
  double sing = kDefaultEpsSing;
};

/// Two graphs u, v over a chart of an ambient structure, compared with one
/// curvature operator on a grid.
struct ComparisonScenario {
  std::string name;
  std::string description;
  StructureSpec structure;
  OperatorKind op = OperatorKind::generic;
  Rational p{0};
  std::string u;
  std::string v;
  Box box;
  std::vector<std::size_t> grid;  // points per chart axis
  Tolerances tol;
  double T = 0.5;
  double step = 1e-3;

  GridSpec grid_spec() const { return GridSpec(box, grid); }
};

}  // namespace subcurv
