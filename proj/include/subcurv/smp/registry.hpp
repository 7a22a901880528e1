#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subcurv/smp/scenario.hpp"

namespace subcurv {

namespace detail {

inline ComparisonScenario make_scenario(std::string name, std::string description, StructureSpec structure,
                                        OperatorKind op, std::string u, std::string v, Box box,
                                        std::vector<std::size_t> grid) {
  ComparisonScenario sc;
  sc.name = std::move(name);
  sc.description = std::move(description);
  sc.structure = std::move(structure);
  sc.op = op;
  sc.u = std::move(u);
  sc.v = std::move(v);
  sc.box = std::move(box);
  sc.grid = std::move(grid);
  return sc;
}

inline StructureSpec spec_of(std::string kind, int n, int m = 2) {
  StructureSpec s;
  s.kind = std::move(kind);
  s.n = n;
  s.m = m;
  return s;
}

}  // namespace detail

/// Builtin comparison scenarios, in listing order.
inline std::vector<ComparisonScenario> builtin_scenarios() {
  using detail::make_scenario;
  using detail::spec_of;
  return {
      make_scenario("h1-counterexample",
                    "two H_F-minimal graphs over the plane (F = (-x2, x1)) touching along x2 = 0 without coinciding",
                    spec_of("graph_F", 1, 2), OperatorKind::graph_HF, "x1*x2 + x2^2", "x1*x2",
                    Box{{{0.5, 1.5}, {-0.25, 0.25}}}, {65, 65}),
      make_scenario("translate-coincide", "a graph compared with itself in the first Heisenberg group",
                    spec_of("heisenberg", 1), OperatorKind::generic, "2*x1 + x1*y1 + y1^3/3",
                    "2*x1 + x1*y1 + y1^3/3", Box{{{-1.0, 1.0}, {-1.0, 1.0}}}, {65, 65}),
      make_scenario("cylinder-sphere-paraboloid",
                    "cap of the sphere rho^4 = 5/8 against a paraboloid tangent to it along r = 1/2 on the "
                    "cylinder over the second Heisenberg group",
                    spec_of("cylinder", 2), OperatorKind::radial_cylinder, "-r2/6 + 5/12",
                    "(5/8 - r2^2)^(1/2)/2", Box{{{0.25, 0.75}, {-0.25, 0.25}, {0.0, 0.0}, {0.0, 0.0}}},
                    {65, 65, 1, 1}),
      make_scenario("hyperplane-z", "the horizontal hyperplane z = 0 of the second Heisenberg group against itself",
                    spec_of("heisenberg", 2), OperatorKind::generic, "0", "0",
                    Box{{{-1.0, 1.0}, {0.0, 0.0}, {-1.0, 1.0}, {0.0, 0.0}}}, {65, 1, 65, 1}),
      make_scenario("vertical-hyperplane",
                    "the vertical hyperplane x1 = 1/2 of the second Heisenberg group as a graph in the la chart",
                    spec_of("heisenberg", 2), OperatorKind::la_graph, "1/2", "1/2",
                    Box{{{-1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}, {-1.0, 1.0}}}, {65, 1, 1, 65}),
  };
}

inline std::optional<ComparisonScenario> find_builtin(const std::string& name) {
  for (auto& sc : builtin_scenarios()) {
    if (sc.name == name) return sc;
  }
  return std::nullopt;
}

}  // namespace subcurv
