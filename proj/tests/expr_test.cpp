#include <gtest/gtest.h>

#include "sdym/expr.hpp"
#include "support.hpp"

using namespace sdym;
using sdym::gen::GenOptions;
using sdym::gen::kTrials;
using sdym::gen::random_expr;

TEST(Rational, NormalizesSignAndGcd) {
  Rational r(6, -4);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 2);
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(Rational(2, 3) / Rational(4, 9), Rational(3, 2));
  EXPECT_THROW(Rational(1, 0), std::exception);
}

TEST(Coefficient, ComplexArithmetic) {
  Coefficient i = Coefficient::imaginary_unit();
  EXPECT_EQ(i * i, Coefficient(-1));
  Coefficient a(Rational(1, 2), Rational(3));
  EXPECT_EQ(a / a, Coefficient(1));
}

TEST(Parse, CommutatorExpands) {
  Expr e = parse("[X_z, M]");
  EXPECT_EQ(e, Expr::x({0, 1, 0}) * Expr::constant("M") - Expr::constant("M") * Expr::x({0, 1, 0}));
}

TEST(Parse, JTimesJinvIsIdentity) {
  Expr e = parse("J*Jinv");
  ASSERT_EQ(e.size(), 1u);
  EXPECT_TRUE(e.terms()[0].factors.empty());
  EXPECT_TRUE(e.terms()[0].coeff.is_one());
  EXPECT_EQ(e, Expr::identity());
}

TEST(Parse, ScalingSeedHasThreeMonomials) {
  Expr e = parse("y*X_y + z*X_z + yb*X_yb");
  ASSERT_EQ(e.size(), 3u);
  for (const auto& m : e.terms()) {
    EXPECT_EQ(m.factors.size(), 1u);
    EXPECT_FALSE(m.coords.is_one());
  }
}

TEST(Parse, RejectsMalformedInput) {
  EXPECT_THROW(parse("X_("), ParseError);
  EXPECT_THROW(parse("[X, M"), ParseError);
  EXPECT_THROW(parse("foo*X"), ParseError);
  EXPECT_THROW(parse("X / M"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  try {
    parse("X + + ");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_GT(e.position(), 0u);
  }
}

TEST(Parse, ScalarsAndPowers) {
  EXPECT_EQ(parse("X^2"), Expr::x() * Expr::x());
  EXPECT_EQ(parse("X/2 + X/2"), Expr::x());
  EXPECT_EQ(parse("0.5*X"), Coefficient(Rational(1, 2)) * Expr::x());
  EXPECT_EQ(parse("2i*X"), Coefficient(Rational(0), Rational(2)) * Expr::x());
  EXPECT_EQ(parse("lam*X"), Expr::lambda() * Expr::x());
}

TEST(Canonical, ExamplesMerge) {
  EXPECT_TRUE(parse("[X,M] + [M,X]").is_zero());
  EXPECT_EQ(parse("2*(X_z*M) - X_z*M"), parse("X_z*M"));
  EXPECT_EQ(parse("Jinv*J*X_y"), parse("X_y"));
}

TEST(Canonical, MixedPartialsCommute) {
  EXPECT_TRUE(equal(parse("X_yz"), parse("X_zy")));
  EXPECT_TRUE(equal(parse("[X,M]"), parse("X*M - M*X")));
  EXPECT_FALSE(equal(parse("Int_z(X_y)"), parse("X")));
}

TEST(Canonical, FactorOrderIsKept) {
  EXPECT_NE(parse("X*M"), parse("M*X"));
  EXPECT_NE(parse("J*X*Jinv"), parse("X"));
}

TEST(Commutator, Examples) {
  EXPECT_TRUE(commutator(parse("M"), parse("M")).is_zero());
  EXPECT_EQ(commutator(parse("X_z"), parse("X_yb")), parse("X_z*X_yb - X_yb*X_z"));
  EXPECT_TRUE(commutator(Expr::identity(), Expr::x()).is_zero());
}

TEST(Trace, Examples) {
  EXPECT_EQ(trace_is_zero(parse("[X, M]"), {}), TraceStatus::yes);
  EXPECT_EQ(trace_is_zero(Expr::identity(), {}), TraceStatus::no);
  EXPECT_EQ(trace_is_zero(parse("X_z*X_yb"), {}), TraceStatus::unknown);
  EXPECT_EQ(trace_is_zero(parse("X_yy + 3*M"), {"M"}), TraceStatus::yes);
  EXPECT_EQ(trace_is_zero(parse("M"), {}), TraceStatus::unknown);
}

// ---------------------------------------------------------------------------
// properties

TEST(ExprProperty, CanonicalizeIsIdempotent) {
  std::mt19937_64 rng(11);
  GenOptions opt;
  opt.j = true;
  opt.integrals = true;
  for (int t = 0; t < kTrials; ++t) {
    Expr e = random_expr(rng, opt);
    EXPECT_EQ(canonicalize(canonicalize(e)), canonicalize(e));
    EXPECT_EQ(canonicalize(e), e);
  }
}

TEST(ExprProperty, EqualIsAnEquivalence) {
  std::mt19937_64 rng(12);
  GenOptions opt;
  for (int t = 0; t < kTrials; ++t) {
    Expr a = random_expr(rng, opt);
    Expr b = parse(a.to_string());
    Expr c = canonicalize(b);
    EXPECT_TRUE(equal(a, a));
    EXPECT_EQ(equal(a, b), equal(b, a));
    EXPECT_TRUE(equal(a, b) && equal(b, c) && equal(a, c));
    Expr d = random_expr(rng, opt);
    EXPECT_EQ(equal(a, d), equal(d, a));
  }
}

TEST(ExprProperty, CommutatorIsBilinearAndAntisymmetric) {
  std::mt19937_64 rng(13);
  GenOptions opt;
  opt.depth = 2;
  for (int t = 0; t < kTrials; ++t) {
    Expr a = random_expr(rng, opt);
    Expr b = random_expr(rng, opt);
    Expr c = random_expr(rng, opt);
    EXPECT_TRUE(equal(commutator(a, b), -commutator(b, a)));
    EXPECT_EQ(commutator(a + Coefficient(3) * c, b),
              commutator(a, b) + Coefficient(3) * commutator(c, b));
  }
}

TEST(ExprProperty, JacobiIdentity) {
  std::mt19937_64 rng(14);
  GenOptions opt;
  opt.depth = 2;
  opt.j = true;
  for (int t = 0; t < kTrials; ++t) {
    Expr a = random_expr(rng, opt);
    Expr b = random_expr(rng, opt);
    Expr c = random_expr(rng, opt);
    Expr jac = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) +
               commutator(c, commutator(a, b));
    EXPECT_TRUE(canonicalize(jac).is_zero());
  }
}

TEST(ExprProperty, ParsePrintRoundTrip) {
  std::mt19937_64 rng(15);
  GenOptions opt;
  opt.j = true;
  opt.integrals = true;
  for (int t = 0; t < kTrials; ++t) {
    Expr e = random_expr(rng, opt);
    EXPECT_EQ(parse(e.to_string()), e) << e.to_string();
    EXPECT_EQ(parse(to_pretty_string(e)), e) << to_pretty_string(e);
  }
}

TEST(ExprProperty, LambdaIsAScalar) {
  std::mt19937_64 rng(16);
  GenOptions opt;
  for (int t = 0; t < 20; ++t) {
    Expr a = random_expr(rng, opt);
    Expr b = random_expr(rng, opt);
    EXPECT_EQ(Expr::lambda() * (a * b), a * (Expr::lambda() * b));
  }
}
