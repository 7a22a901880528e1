#include <gtest/gtest.h>

#include <cmath>

#include "subcurv/calculus.hpp"
#include "support.hpp"

namespace subcurv {
namespace {

using testing::Rng;

const CoordSystem kXz({"x1", "z"});
const CoordSystem kH1({"x1", "y1", "z"});

TEST(Parse, SumOfPowers) {
  Expr e = parse_expr("x1^2 + 4*z^2", kXz);
  Expr expected = Expr::sum({pow(variable(0), 2), Expr::product({constant(4), pow(variable(1), 2)})});
  EXPECT_EQ(e, expected);
}

TEST(Parse, ZeroIsConstant) {
  Expr e = parse_expr("0", kXz);
  EXPECT_TRUE(e.is_zero());
}

TEST(Parse, RhoMatchesHandBuiltTree) {
  Expr rho = parse_expr("((x1^2+y1^2)^2 + 4*z^2)^(1/4)", kH1);
  Expr r2 = pow(variable(0), 2) + pow(variable(1), 2);
  Expr expected = pow(pow(r2, 2) + 4 * pow(variable(2), 2), Rational{1, 4});
  EXPECT_EQ(rho, expected);
}

TEST(Parse, PrecedenceAndUnaryMinus) {
  EXPECT_DOUBLE_EQ(evaluate(parse_expr("-x1^2", kXz), {3.0, 0.0}), -9.0);
  EXPECT_DOUBLE_EQ(evaluate(parse_expr("2^-1*x1", kXz), {4.0, 0.0}), 2.0);
  EXPECT_DOUBLE_EQ(evaluate(parse_expr("x1/2/z", kXz), {8.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(evaluate(parse_expr("2^3^2", kXz), {0.0, 0.0}), 512.0);
}

TEST(Parse, ExactDecimalsAndExponents) {
  Expr e = parse_expr("0.25 + 1e-2", kXz);
  ASSERT_TRUE(e.is_constant());
  ASSERT_TRUE(e.value().is_exact());
  EXPECT_EQ(e.value().rational(), (Rational{26, 100}));
}

TEST(Parse, DefinitionsExpand) {
  Definitions defs{{"r2", pow(variable(0), 2) + pow(variable(1), 2)}};
  Expr e = parse_expr("r2 - z", kH1, defs);
  EXPECT_DOUBLE_EQ(evaluate(e, {1.0, 2.0, 3.0}), 2.0);
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse_expr("x1 + w", kXz);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 5U);
    EXPECT_NE(std::string(e.what()).find("unknown identifier 'w'"), std::string::npos);
  }
  EXPECT_THROW(parse_expr("x1^z", kXz), ParseError);
  EXPECT_THROW(parse_expr("(x1", kXz), ParseError);
  EXPECT_THROW(parse_expr("", kXz), ParseError);
  EXPECT_THROW(parse_expr("x1 $", kXz), ParseError);
}

TEST(CoordSystemTest, RejectsBadNames) {
  EXPECT_THROW(CoordSystem({"x"}), std::invalid_argument);
  EXPECT_THROW(CoordSystem({"x", "x"}), std::invalid_argument);
  EXPECT_THROW(CoordSystem({"x", "1y"}), std::invalid_argument);
}

TEST(Differentiate, Monomials) {
  Expr e = parse_expr("x1^2", kXz);
  EXPECT_EQ(differentiate(e, 0), 2 * variable(0));
  EXPECT_TRUE(differentiate(e, 1).is_zero());
}

TEST(Differentiate, RhoDerivativeMatchesClosedFormAndDifferences) {
  Expr rho = parse_expr("((x1^2+y1^2)^2+4*z^2)^(1/4)", kH1);
  Expr closed = parse_expr("x1*(x1^2+y1^2)*((x1^2+y1^2)^2+4*z^2)^(-3/4)", kH1);
  Expr d = differentiate(rho, 0);
  Tape rt(rho);
  Rng rng(11);
  for (int i = 0; i < 5; ++i) {
    auto x = rng.point(3, -2.0, 2.0);
    double fd = testing::central_difference([&](std::span<const double> p) { return rt(p)[0]; }, x, 0);
    EXPECT_NEAR(evaluate(d, x), evaluate(closed, x), 1e-12);
    EXPECT_LE(testing::rel_err(evaluate(d, x), fd), 1e-6);
  }
}

TEST(Evaluate, RhoValues) {
  Expr rho = parse_expr("((x1^2+y1^2)^2 + 4*z^2)^(1/4)", kH1);
  EXPECT_NEAR(evaluate(rho, {1.0, 0.0, 1.0}), std::pow(5.0, 0.25), 1e-15);
  EXPECT_NEAR(evaluate(rho, {1.0, 0.0, 1.0}), 1.49534878, 1e-8);
  EXPECT_DOUBLE_EQ(evaluate(rho, {1.0, 0.0, 0.0}), 1.0);
}

TEST(Evaluate, DomainErrors) {
  EXPECT_THROW(evaluate(parse_expr("x1^(1/2)", kXz), {-1.0, 0.0}), NonSmoothPoint);
  EXPECT_THROW(evaluate(parse_expr("1/x1", kXz), {0.0, 0.0}), DivisionByZero);
  EXPECT_THROW(evaluate(parse_expr("z", kXz), {1.0}), DimensionMismatch);
}

TEST(Substitute, ComposesAndChecksRange) {
  Expr e = parse_expr("x1*z", kXz);
  Expr s = substitute(e, {variable(1), constant(3)});
  EXPECT_DOUBLE_EQ(evaluate(s, {0.0, 2.0}), 6.0);
  EXPECT_THROW(substitute(e, {variable(0)}), DimensionMismatch);
}

TEST(Unparse, RendersReadableText) {
  EXPECT_EQ(unparse(parse_expr("3 - z/2 - x1*y1", kH1), kH1), "3 - 1/2*z - x1*y1");
}

// Property: symbolic derivatives agree with central differences.
TEST(CalculusProperty, DerivativeMatchesCentralDifferences) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 3;
    Expr e = rng.mixed(dim);
    Tape t(e);
    auto x = rng.point(dim, -1.0, 1.0);
    for (std::size_t i = 0; i < dim; ++i) {
      double sym = evaluate(differentiate(e, i), x);
      double fd = testing::central_difference4([&](std::span<const double> p) { return t(p)[0]; }, x, i);
      ASSERT_LE(testing::rel_err(sym, fd), 1e-6) << unparse(e, kH1) << " axis " << i;
    }
  }
}

// Property: parse(unparse(parse(s))) == parse(s).
TEST(CalculusProperty, UnparseRoundTripIsFixedPoint) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Expr e = rng.mixed(3);
    std::string text = unparse(e, kH1);
    Expr back = parse_expr(text, kH1);
    ASSERT_EQ(back, e) << text;
    ASSERT_EQ(unparse(back, kH1), text);
  }
}

// Property: D(a e1 + e2) = a D(e1) + D(e2) pointwise.
TEST(CalculusProperty, DerivativeIsLinear) {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    Expr e1 = rng.mixed(3);
    Expr e2 = rng.mixed(3);
    Rational a{rng.integer(-5, 5), rng.integer(1, 4)};
    auto x = rng.point(3, -1.0, 1.0);
    for (std::size_t i = 0; i < 3; ++i) {
      double lhs = evaluate(differentiate(a * e1 + e2, i), x);
      double rhs = a.to_double() * evaluate(differentiate(e1, i), x) + evaluate(differentiate(e2, i), x);
      ASSERT_LE(testing::rel_err(lhs, rhs), 1e-12);
    }
  }
}

TEST(CalculusProperty, TapeSharesSubexpressionsAndIsDeterministic) {
  Rng rng(5);
  Expr e = rng.mixed(3);
  std::vector<Expr> outs{e, e, differentiate(e, 0)};
  Tape t(outs);
  EXPECT_EQ(t.output_count(), 3U);
  auto x = rng.point(3, -1.0, 1.0);
  auto a = t(x);
  auto b = t(x);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[0], a[1]);
}

}  // namespace
}  // namespace subcurv
