#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "subcurv/core.hpp"
#include "subcurv/heisenberg.hpp"
#include "support.hpp"

namespace subcurv {
namespace {

using testing::Rng;
using testing::rel_err;

using Fn = std::function<double(std::span<const double>)>;

/// Directional derivative Σ W^k ∂_k f by central differences.
double directional(const Fn& f, const std::vector<double>& w, std::vector<double> x, double h = 1e-5) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (w[k] == 0.0) continue;
    s += w[k] * testing::central_difference(f, x, k, h);
  }
  return s;
}

HeisenbergPoint hp(int n, std::vector<double> c) { return HeisenbergPoint(n, std::move(c)); }

void expect_point_near(const HeisenbergPoint& a, const std::vector<double>& b, double tol = 1e-12) {
  ASSERT_EQ(a.coords.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(a.coords[i], b[i], tol) << "coordinate " << i;
}

TEST(Group, MultiplicationExample) {
  expect_point_near(group_mul(hp(1, {1, 0, 0}), hp(1, {0, 1, 0})), {1, 1, -1}, 0.0);
}

TEST(Group, IdentityAndInverse) {
  Rng rng(1);
  for (int n = 1; n <= 3; ++n) {
    auto g = hp(n, rng.point(2 * n + 1, -3, 3));
    expect_point_near(group_mul(HeisenbergPoint::identity(n), g), g.coords, 0.0);
    expect_point_near(group_mul(g, inverse(g)), std::vector<double>(2 * n + 1, 0.0));
    expect_point_near(group_mul(inverse(g), g), std::vector<double>(2 * n + 1, 0.0));
  }
  EXPECT_THROW(group_mul(hp(1, {0, 0, 0}), hp(2, {0, 0, 0, 0, 0})), DimensionMismatch);
  EXPECT_THROW(hp(2, {0, 0, 0}), DimensionMismatch);
}

TEST(Group, Associativity) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + i % 3;
    auto a = hp(n, rng.point(2 * n + 1, -2, 2));
    auto b = hp(n, rng.point(2 * n + 1, -2, 2));
    auto c = hp(n, rng.point(2 * n + 1, -2, 2));
    expect_point_near(group_mul(group_mul(a, b), c), group_mul(a, group_mul(b, c)).coords);
  }
}

TEST(Isometry, Examples) {
  expect_point_near(apply_isometry(LaTranslation{1.0}, HeisenbergPoint::identity(2)), {1, 0, 0, 0, 0}, 0.0);
  expect_point_near(apply_isometry(RotationSwap{}, hp(1, {0.3, -0.7, 2.0})), {-0.7, -0.3, 2.0}, 0.0);
  EXPECT_THROW(apply_isometry(Dilation{0.0}, hp(1, {1, 1, 1})), std::invalid_argument);
}

TEST(Isometry, LaTranslationIsLeftTranslation) {
  Rng rng(3);
  for (int n = 1; n <= 3; ++n) {
    double a = rng.uniform(-2, 2);
    std::vector<double> by(2 * n + 1, 0.0);
    by[0] = a;
    auto q = hp(n, rng.point(2 * n + 1, -2, 2));
    expect_point_near(apply_isometry(LaTranslation{a}, q), apply_isometry(LeftTranslation{hp(n, by)}, q).coords);
  }
}

TEST(Isometry, DilationScalesGauge) {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    auto q = hp(2, rng.point(5, -2, 2));
    double lambda = rng.uniform(-3, 3);
    EXPECT_LE(rel_err(heisenberg_rho(apply_isometry(Dilation{lambda}, q)), std::abs(lambda) * heisenberg_rho(q)),
              1e-14);
  }
}

TEST(Isometry, CoordinateMapMatchesPointMap) {
  Rng rng(5);
  for (int n = 1; n <= 2; ++n) {
    std::vector<IsometryKind> kinds{LeftTranslation{hp(n, rng.point(2 * n + 1, -1, 1))}, LaTranslation{0.75},
                                    Dilation{-1.5}, RotationSwap{}};
    for (const auto& k : kinds) {
      auto map = isometry_map(k, n);
      auto q = hp(n, rng.point(2 * n + 1, -2, 2));
      auto image = apply_isometry(k, q);
      for (std::size_t i = 0; i < map.size(); ++i) EXPECT_NEAR(evaluate(map[i], q.coords), image.coords[i], 1e-13);
    }
  }
}

TEST(StandardStructure, CometricForFirstGroup) {
  auto s = standard_structure(1);
  Rng rng(6);
  for (int i = 0; i < 5; ++i) {
    auto x = rng.point(3, -2, 2);
    const double expected[3][3] = {{1, 0, x[1]}, {0, 1, -x[0]}, {x[1], -x[0], x[0] * x[0] + x[1] * x[1]}};
    for (int l = 0; l < 3; ++l) {
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(evaluate(s.cometric[l][k], x), expected[l][k], 1e-14);
    }
  }
}

TEST(StandardStructure, ContactFormIsNull) {
  for (int n = 1; n <= 3; ++n) {
    auto s = standard_structure(n);
    auto v = raise_covector(s, heisenberg_contact_form(n));
    for (const auto& c : v) EXPECT_TRUE(c.is_zero());
  }
}

TEST(CylinderStructure, ConormScalesByGauge) {
  Rng rng(7);
  for (int n = 1; n <= 2; ++n) {
    auto cyl = cylinder_structure(n);
    auto std_s = standard_structure(n);
    for (int trial = 0; trial < 5; ++trial) {
      Expr phi = rng.polynomial(2 * n + 1, 3, 4);
      ScalarField f{phi, std_s.coords, {}};
      auto x = rng.point(2 * n + 1, 0.2, 1.0);
      double rho = heisenberg_rho(hp(n, x));
      EXPECT_LE(rel_err(conorm(cyl, f, x), rho * conorm(std_s, f, x)), 1e-12);
    }
  }
}

TEST(CylinderStructure, UnitGaugeDensityIsOne) {
  auto cyl = cylinder_structure(1);
  const double on_unit[] = {1.0, 0.0, 0.0};
  EXPECT_NEAR(evaluate(cyl.density, on_unit), 1.0, 1e-15);
}

TEST(CylinderStructure, CurvatureRelationToStandard) {
  Rng rng(8);
  for (int n = 1; n <= 2; ++n) {
    auto cyl = cylinder_structure(n);
    auto std_s = standard_structure(n);
    auto frames = heisenberg_frames(n);
    Expr rho = heisenberg_rho(n);
    int checked = 0;
    for (int trial = 0; trial < 8; ++trial) {
      Expr phi = rng.polynomial(2 * n + 1, 2, 4);
      CurvatureEvaluator hc(cyl, phi, Rational{0});
      CurvatureEvaluator hs(std_s, phi, Rational{0});
      auto x = rng.point(2 * n + 1, 0.2, 1.0);
      double c = hs.conorm(x);
      if (c < 1e-2) continue;
      double drift = 0.0;
      for (const auto& e : frames) drift += evaluate(e.apply(phi), x) / c * evaluate(e.apply(rho), x);
      double expected = evaluate(rho, x) * hs(x) - (2 * n + 1) * drift;
      EXPECT_LE(rel_err(hc(x), expected), 1e-8);
      ++checked;
    }
    EXPECT_GT(checked, 4);
  }
}

TEST(CylinderStructure, GaugeSphereConorm) {
  Rng rng(9);
  for (int n = 1; n <= 2; ++n) {
    auto s = standard_structure(n);
    Expr phi = pow(heisenberg_r2(n), 2) + 4 * pow(variable(2 * n), 2) - constant(5);
    for (int i = 0; i < 5; ++i) {
      auto x = rng.point(2 * n + 1, -1, 1);
      double r2 = 0.0;
      for (int k = 0; k < 2 * n; ++k) r2 += x[k] * x[k];
      double rho = heisenberg_rho(hp(n, x));
      EXPECT_LE(rel_err(conorm(s, ScalarField{phi, s.coords, {}}, x), 4.0 * std::sqrt(r2) * rho * rho), 1e-12);
    }
  }
}

TEST(CylinderStructure, GaugeSphereIsMinimal) {
  Rng rng(10);
  for (int n = 1; n <= 2; ++n) {
    auto s = cylinder_structure(n);
    for (int c : {1, 5}) {
      CurvatureEvaluator h(s, pow(heisenberg_r2(n), 2) + 4 * pow(variable(2 * n), 2) - constant(c), Rational{0});
      for (int i = 0; i < 10; ++i) {
        auto x = rng.point(2 * n + 1, -1, 1);
        double r2 = 0.0;
        for (int k = 0; k < 2 * n; ++k) r2 += x[k] * x[k];
        if (r2 < 0.09) continue;
        EXPECT_NEAR(h(x), 0.0, 1e-8);
      }
    }
  }
}

TEST(CylinderStructure, ParaboloidEnginesAgree) {
  for (auto [n, cnum, cden] : {std::tuple{1, 1, 1}, {2, 1, 2}, {2, 1, 1}, {3, 1, 3}}) {
    Rational c{cnum, cden};
    double cv = static_cast<double>(cnum) / cden;
    double closed = 2.0 * (2 * n - 1) * cv / std::pow(1.0 + 4.0 * cv * cv, 0.25);
    RadialCylinderOperator radial(n, constant(c) * pow(variable(0), 2));
    auto s = cylinder_structure(n);
    CurvatureEvaluator generic(s, constant(c) * heisenberg_r2(n) - variable(2 * n), Rational{0});
    CurvatureEvaluator flipped(s, variable(2 * n) - constant(c) * heisenberg_r2(n), Rational{0});
    for (double r0 : {0.3, 0.8, 1.7}) {
      EXPECT_LE(rel_err(radial(r0), closed), 1e-8);
      std::vector<double> x(2 * n + 1, 0.0);
      x[0] = r0 * 0.6;
      x[n] = r0 * 0.8;
      x[2 * n] = cv * r0 * r0;
      EXPECT_LE(rel_err(generic(x), closed), 1e-8);
      EXPECT_LE(rel_err(flipped(x), -closed), 1e-8);
    }
  }
}

TEST(RadialCylinder, ClosedFormValues) {
  EXPECT_NEAR(radial_cylinder_curvature(pow(variable(0), 2), 1, 0.7), 1.3374806, 1e-7);
  EXPECT_NEAR(radial_cylinder_curvature(Rational{1, 2} * pow(variable(0), 2), 2, 1.3), 3.0 / std::pow(2.0, 0.25), 1e-12);
  for (int n = 1; n <= 3; ++n) EXPECT_NEAR(radial_cylinder_curvature(Expr{}, n, 0.9), 0.0, 1e-14);
  EXPECT_THROW(radial_cylinder_curvature(pow(variable(0), 2), 1, 0.0), NonSmoothPoint);
  EXPECT_THROW(RadialCylinderOperator(1, variable(1)), std::invalid_argument);
}

TEST(GraphOperator, ExamplesVanish) {
  auto F = default_F(2);
  auto coords = graph_coords(2);
  Rng rng(11);
  for (const char* src : {"x1*x2 + x2^2", "x1*x2", "0"}) {
    ScalarField u{parse_expr(src, coords), coords, {}};
    for (int i = 0; i < 10; ++i) {
      std::vector<double> x{rng.uniform(0.1, 2), rng.uniform(-0.05, 2)};
      EXPECT_NEAR(graph_operator_HF(F, u, x), 0.0, 1e-12) << src;
    }
  }
  ScalarField zero{Expr{}, coords, {}};
  const double origin[] = {0.0, 0.0};
  EXPECT_THROW(graph_operator_HF(F, zero, origin), SingularPoint);
}

TEST(GraphOperator, NullCoformAndConorm) {
  auto F = default_F(2);
  auto s = theoremF_structure(F, 2);
  for (const auto& c : raise_covector(s, theoremF_null_coform(F))) EXPECT_TRUE(c.is_zero());
  Expr u = parse_expr("x1^3 - x2", s.coords);
  GraphHFOperator op(F, u);
  Rng rng(12);
  for (int i = 0; i < 5; ++i) {
    auto x = rng.point(3, -1, 1);
    std::vector<double> w;
    EXPECT_LE(rel_err(conorm(s, ScalarField{u - variable(2), s.coords, {}}, x), op.norm(x, w)), 1e-13);
  }
}

TEST(IntrinsicGraph, LinearProfilesAreMinimal) {
  Rng rng(13);
  for (int n = 1; n <= 3; ++n) {
    auto coords = la_chart_coords(n);
    for (double a : {0.0, 1.5, -2.0}) {
      ScalarField u{a == 0.0 ? Expr{} : Expr::constant(Number::inexact(a)) * variable(n - 1), coords, {}};
      auto x = rng.point(2 * n, -1, 1);
      EXPECT_NEAR(intrinsic_graph_curvature(n, u, x), 0.0, 1e-13);
    }
  }
}

// u = τ in the n = 2 chart (η², η³, η⁴, τ); fields ê₂, ê^u₃ = ∂η³ − 2τ∂τ, ê₄.
TEST(IntrinsicGraph, FiniteDifferenceOracle) {
  const int n = 2;
  auto coords = la_chart_coords(n);
  ScalarField u{parse_expr("tau", coords), coords, {}};
  auto fields = [](const std::vector<double>& x) {
    return std::vector<std::vector<double>>{{1, 0, 0, x[2]}, {0, 1, 0, -2 * x[3]}, {0, 0, 1, -x[0]}};
  };
  auto wu = [&](const std::vector<double>& x) {
    auto f = fields(x);
    std::vector<double> v;
    for (const auto& w : f) v.push_back(w[3]);  // W(τ) is the τ component
    return v;
  };
  Rng rng(14);
  for (int i = 0; i < 3; ++i) {
    auto x = rng.point(4, -1, 1);
    auto frozen = fields(x);
    double h = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      Fn quotient = [&, k](std::span<const double> yy) { std::vector<double> y(yy.begin(), yy.end());
        auto v = wu(y);
        return v[k] / std::sqrt(1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      };
      h += directional(quotient, frozen[k], x);
    }
    EXPECT_NEAR(intrinsic_graph_curvature(n, u, x), h, 1e-6);
  }
}

TEST(LaGraph, ConstantProfilesAreMinimal) {
  Rng rng(15);
  for (int n = 1; n <= 3; ++n) {
    auto coords = la_chart_coords(n);
    for (const char* src : {"0", "3", "-1/2"}) {
      ScalarField u{parse_expr(src, coords), coords, {}};
      auto x = rng.point(2 * n, -1, 1);
      EXPECT_NEAR(la_graph_curvature(n, u, x), 0.0, 1e-13);
    }
  }
}

// u = η² in the n = 2 chart: Wu = (1, 0, 0) for W = (ê₂, ∂η³, ê₄), ∂τu = 0.
TEST(LaGraph, FiniteDifferenceOracle) {
  const int n = 2;
  auto coords = la_chart_coords(n);
  ScalarField u{parse_expr("eta2", coords), coords, {}};
  auto fields = [](const std::vector<double>& x) {
    return std::vector<std::vector<double>>{{1, 0, 0, x[2]}, {0, 1, 0, 0}, {0, 0, 1, -x[0]}};
  };
  const double d = std::sqrt(2.0);
  Rng rng(16);
  for (int i = 0; i < 3; ++i) {
    auto x = rng.point(4, -1, 1);
    auto frozen = fields(x);
    Fn tau_term = [&](std::span<const double>) { return -1.0 / d; };
    double h = 2 * x[1] * directional(tau_term, {0, 0, 0, 1}, x);
    const double wu[3] = {1, 0, 0};
    for (std::size_t k = 0; k < 3; ++k) {
      Fn quotient = [&, k](std::span<const double>) { return wu[k] / d; };
      h += directional(quotient, frozen[k], x);
    }
    EXPECT_NEAR(la_graph_curvature(n, u, x), h, 1e-6);
  }
}

// A profile with genuine dependence on every chart coordinate.
TEST(LaGraph, FiniteDifferenceOracleNonlinear) {
  const int n = 2;
  auto coords = la_chart_coords(n);
  ScalarField u{parse_expr("eta2*tau/4 + eta3^2/5 - eta4*tau/3", coords), coords, {}};
  auto grad = [](const std::vector<double>& y) {
    return std::vector<double>{y[3] / 4, 2 * y[1] / 5, -y[3] / 3, y[0] / 4 - y[2] / 3};
  };
  auto fields = [](const std::vector<double>& y) {
    return std::vector<std::vector<double>>{{1, 0, 0, y[2]}, {0, 1, 0, 0}, {0, 0, 1, -y[0]}};
  };
  auto wu = [&](std::span<const double> yy) { std::vector<double> y(yy.begin(), yy.end());
    auto g = grad(y);
    std::vector<double> v;
    for (const auto& w : fields(y)) v.push_back(w[0] * g[0] + w[1] * g[1] + w[2] * g[2] + w[3] * g[3]);
    return v;
  };
  auto dfun = [&](std::span<const double> yy) { std::vector<double> y(yy.begin(), yy.end());
    auto v = wu(y);
    return std::sqrt(1.0 - 4 * y[1] * grad(y)[3] + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  };
  Rng rng(17);
  for (int i = 0; i < 3; ++i) {
    auto x = rng.point(4, -0.5, 0.5);
    Fn tau_term = [&](std::span<const double> yy) { std::vector<double> y(yy.begin(), yy.end()); return (-1.0 + 2 * y[1] * grad(y)[3]) / dfun(y); };
    double h = 2 * x[1] * directional(tau_term, {0, 0, 0, 1}, x);
    auto frozen = fields(x);
    for (std::size_t k = 0; k < 3; ++k) {
      Fn quotient = [&, k](std::span<const double> yy) { std::vector<double> y(yy.begin(), yy.end()); return wu(y)[k] / dfun(y); };
      h += directional(quotient, frozen[k], x);
    }
    EXPECT_NEAR(la_graph_curvature(n, u, x), h, 1e-6);
  }
}

// Property: H of φ∘L_g at x equals H of φ at g∘x.
TEST(HeisenbergProperty, LeftTranslationInvariance) {
  Rng rng(21);
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const int n = 1 + i % 2;
    auto s = standard_structure(n);
    Expr phi = rng.polynomial(2 * n + 1, 3, 4);
    auto g = hp(n, rng.point(2 * n + 1, -1, 1));
    Expr pulled = substitute(phi, isometry_map(LeftTranslation{g}, n));
    auto x = rng.point(2 * n + 1, -1, 1);
    auto gx = group_mul(g, hp(n, x)).coords;
    CurvatureEvaluator a(s, phi, Rational{0});
    CurvatureEvaluator b(s, pulled, Rational{0});
    if (a.conorm(gx) < 1e-3) continue;
    EXPECT_LE(rel_err(b(x), a(gx)), 1e-8);
    ++checked;
  }
  EXPECT_GT(checked, 15);
}

// Property: φ = u(η, τ) − x¹ with τ = z + x¹x^{n+1} is l_a-compatible.
TEST(HeisenbergProperty, LaTranslationInvariance) {
  Rng rng(22);
  for (int i = 0; i < 20; ++i) {
    const int n = 1 + i % 2;
    auto s = standard_structure(n);
    Expr chart_u = rng.polynomial(2 * n, 2, 3);
    std::vector<Expr> to_chart;
    for (int k = 1; k < 2 * n; ++k) to_chart.push_back(variable(k));
    to_chart.push_back(variable(2 * n) + variable(0) * variable(n));
    Expr phi = substitute(chart_u, to_chart) - variable(0);
    CurvatureEvaluator h(s, phi, Rational{0});
    auto x = rng.point(2 * n + 1, -1, 1);
    double a = rng.uniform(-2, 2);
    auto moved = apply_isometry(LaTranslation{a}, hp(n, x)).coords;
    EXPECT_LE(rel_err(h(moved), h(x)), 1e-8);
  }
}

TEST(HeisenbergProperty, VerticalTranslationInvariance) {
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    auto s = standard_structure(1);
    Expr phi = rng.polynomial(2, 3, 4) - variable(2);
    CurvatureEvaluator h(s, phi, Rational{1, 2});
    auto x = rng.point(3, -1, 1);
    auto y = x;
    y[2] += rng.uniform(-3, 3);
    if (h.conorm(x) < 1e-3) continue;
    EXPECT_LE(rel_err(h(y), h(x)), 1e-8);
  }
}

// Property: H of φ∘τ_λ at x equals H of φ at τ_λ(x) on the cylinder.
TEST(HeisenbergProperty, CylinderDilationInvariance) {
  Rng rng(24);
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const int n = 1 + i % 2;
    auto s = cylinder_structure(n);
    Expr phi = rng.polynomial(2 * n + 1, 3, 4);
    double lambda = rng.uniform(0.5, 2.0) * (i % 3 == 0 ? -1.0 : 1.0);
    Expr pulled = substitute(phi, isometry_map(Dilation{lambda}, n));
    auto x = rng.point(2 * n + 1, 0.2, 1.0);
    auto tx = apply_isometry(Dilation{lambda}, hp(n, x)).coords;
    CurvatureEvaluator a(s, phi, Rational{0});
    CurvatureEvaluator b(s, pulled, Rational{0});
    if (a.conorm(tx) < 1e-3) continue;
    EXPECT_LE(rel_err(b(x), a(tx)), 1e-8);
    ++checked;
  }
  EXPECT_GT(checked, 15);
}

}  // namespace
}  // namespace subcurv
