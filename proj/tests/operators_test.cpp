#include <gtest/gtest.h>

#include "sdym/numeric.hpp"
#include "sdym/operators.hpp"
#include "support.hpp"

using namespace sdym;

namespace {

const EquationSystem& G() { return EquationSystem::psdym3(); }
const EquationSystem& K() { return EquationSystem::coupled(); }

Characteristic X(const char* s) { return Characteristic::on_x(parse(s)); }
Characteristic Q(const char* s) { return Characteristic::on_j(parse(s)); }

bool same_mod(const Expr& a, const Expr& b, const EquationSystem& sys) {
  return reduce_mod(a - b, sys).is_zero();
}

CheckPolicy modulo_kernel() {
  CheckPolicy p;
  p.modulo_z_kernel = true;
  return p;
}

}  // namespace

TEST(Recursion, WorkedExamples) {
  EXPECT_EQ(recursion_R(X("M")).expr, parse("[X, M]"));
  EXPECT_EQ(recursion_R(X("X_z")).expr, parse("X_y"));
  EXPECT_EQ(recursion_R(X("X_yb")).expr, parse("-X_z"));
  EXPECT_EQ(recursion_R(X("X_y")).expr, parse("Int_z(X_yy + [X_z, X_y])"));
  EXPECT_EQ(recursion_R(X("0")).expr, Expr());
}

TEST(Recursion, DefiningRelationHolds) {
  // D_z R(phi) = A_y phi modulo the equation; independent of the integrator
  for (const char* s : {"M", "X_y", "[X, M]", "X_yb*M", "z*X_z"}) {
    Characteristic phi = X(s);
    Expr lhs = total_derivative(recursion_R(phi).expr, Coordinate::z);
    EXPECT_TRUE(same_mod(lhs, covariant_y(phi.expr), G())) << s;
  }
}

TEST(Recursion, TargetsAreChecked) {
  EXPECT_THROW(recursion_R(Q("J*M")), std::invalid_argument);
  EXPECT_THROW(recursion_T(X("M")), std::invalid_argument);
  EXPECT_THROW(lift_by_J(Q("J")), std::invalid_argument);
}

TEST(RecursionT, Examples) {
  Characteristic t = recursion_T(Q("J*M"));
  EXPECT_EQ(t.target, Target::J);
  EXPECT_TRUE(same_mod(t.expr, parse("J*[X, M]"), K()));
  // J_y = J X_z on shell, so T(J_y) = J X_y
  EXPECT_TRUE(same_mod(recursion_T(Q("J_y")).expr, parse("J*X_y"), K()));
  EXPECT_TRUE(lift_by_J(X("0")).expr.is_zero());
  EXPECT_EQ(lift_by_J(X("M")).expr, parse("J*M"));
}

TEST(Hierarchy, SecondMemberOfM) {
  Hierarchy h = hierarchy(X("M"), 2, {"M"});
  ASSERT_EQ(h.items.size(), 3u);
  EXPECT_EQ(h.op, OperatorTag::R);
  EXPECT_EQ(h.items[0].expr, parse("M"));
  EXPECT_EQ(h.items[1].expr, parse("[X, M]"));
  // hand expansion: D_z R[X, M] = [X_y, M] + [X_z, [X, M]]
  Expr dz = total_derivative(h.items[2].expr, Coordinate::z);
  EXPECT_TRUE(same_mod(dz, parse("[X_y, M] + [X_z, [X, M]]"), G()));
  for (TraceStatus t : h.trace) EXPECT_EQ(t, TraceStatus::yes);
}

TEST(Hierarchy, SeedXz) {
  Hierarchy h = hierarchy(X("X_z"), 3);
  ASSERT_EQ(h.items.size(), 4u);
  EXPECT_EQ(h.items[1].expr, parse("X_y"));
  EXPECT_EQ(h.items[2].expr, recursion_R(X("X_y")).expr);
  EXPECT_EQ(h.items[3].expr, recursion_R(h.items[2]).expr);
}

TEST(Hierarchy, JSideUsesT) {
  Hierarchy h = hierarchy(Q("J*M"), 2, {"M"});
  EXPECT_EQ(h.op, OperatorTag::T);
  ASSERT_EQ(h.items.size(), 3u);
  EXPECT_EQ(h.items[2].expr, recursion_T(h.items[1]).expr);
  EXPECT_THROW(hierarchy(X("M"), -1), std::invalid_argument);
}

TEST(Hierarchy, TracelessUpToDepthFour) {
  Hierarchy h = hierarchy(X("M"), 4, {"M"});
  ASSERT_EQ(h.trace.size(), 5u);
  for (TraceStatus t : h.trace) EXPECT_EQ(t, TraceStatus::yes);
}

TEST(Symmetry, ResidualExamples) {
  EXPECT_TRUE(symmetry_residual_psdym3(X("M")).is_zero());
  EXPECT_TRUE(symmetry_residual_psdym3(X("X_y")).is_zero());
  EXPECT_TRUE(symmetry_residual_psdym3(X("[X, M]")).is_zero());
  EXPECT_TRUE(symmetry_residual_sdym3(Q("J")).is_zero());
  EXPECT_TRUE(symmetry_residual_sdym3(Q("J*M")).is_zero());
  EXPECT_TRUE(symmetry_residual_sdym3(Q("J_y")).is_zero());
  // X*X is not a symmetry; the shear family sees it numerically
  Expr r = symmetry_residual_psdym3(X("X*X"));
  EXPECT_FALSE(r.is_zero());
  EXPECT_EQ(verify_zero("XX", r, {}).status, Verdict::fail);
}

TEST(Symmetry, FirstImagesAreSymmetries) {
  for (const char* s : {"M", "X_z", "X_yb", "X_y", "[X, M]"}) {
    Characteristic psi = recursion_R(X(s));
    EXPECT_EQ(verify_zero(s, symmetry_residual_psdym3(psi), {}).status, Verdict::pass) << s;
  }
  Characteristic q = recursion_T(Q("J*M"));
  EXPECT_EQ(verify_zero("T", symmetry_residual_sdym3(q), {}).status, Verdict::pass);
}

TEST(Symmetry, ThirdMemberNeedsItsConstant) {
  Hierarchy h = hierarchy(X("M"), 3, {"M"});
  VerificationReport r = check_recursion_step(h.items[2], h.items[3], {});
  EXPECT_EQ(r.status, Verdict::pass) << r.details;
}

TEST(Iso, Examples) {
  EXPECT_EQ(iso_map_I(Q("J*M")).expr, parse("[X, M]"));
  EXPECT_EQ(iso_map_I(Q("J_y")).expr, parse("X_y"));
  EXPECT_EQ(iso_map_I(Q("J_y")).target, Target::X);
  EXPECT_THROW(iso_map_I(X("M")), std::invalid_argument);
}

TEST(Bracket, ConstantGenerators) {
  // Delta_{J A}(J B) = J A B, so the bracket is J [A, B]
  Characteristic b = lie_bracket(Q("J*M"), Q("J*N"));
  EXPECT_TRUE(same_mod(b.expr, parse("J*[M, N]"), K()));
  Characteristic c = lie_bracket(Q("J*N"), Q("J*M"));
  EXPECT_TRUE(same_mod(b.expr + c.expr, Expr(), K()));
  EXPECT_TRUE(lie_bracket(X("M"), X("M")).expr.is_zero());
  EXPECT_THROW(lie_bracket(X("M"), Q("J")), std::invalid_argument);
}

TEST(Bracket, XSide) {
  // Delta_M(X_y) = 0 and Delta_{X_y}(M) = 0
  EXPECT_TRUE(lie_bracket(X("M"), X("X_y")).expr.is_zero());
  // [M, [X, N]] : Delta_M [X, N] = [M, N]
  Characteristic b = lie_bracket(X("M"), X("[X, N]"));
  EXPECT_TRUE(same_mod(b.expr, parse("[M, N]"), G()));
}

TEST(DeltaRCommutator, Examples) {
  EXPECT_EQ(check_lemma17(X("X_y"), parse("M")).status, Verdict::pass);
  EXPECT_EQ(check_lemma17(X("[X, M]"), parse("X_z")).status, Verdict::pass);
  EXPECT_EQ(check_lemma17(X("0"), parse("X_y")).status, Verdict::pass);
}

TEST(IEquivalence, Examples) {
  for (const char* s : {"J*M", "J_y"}) {
    EXPECT_EQ(check_I_equivalence(OperatorTag::R, OperatorTag::T, Q(s)).status, Verdict::pass) << s;
  }
  EXPECT_EQ(check_I_equivalence(OperatorTag::R, OperatorTag::R, Q("J*M")).status,
            Verdict::inconclusive);
}

TEST(Homomorphy, ConstantPair) {
  EXPECT_EQ(check_homomorphy(Q("J*M"), Q("J*N")).status, Verdict::pass);
  EXPECT_EQ(check_homomorphy(Q("J*M"), Q("J_y")).status, Verdict::pass);
}

TEST(Abelian, Depths) {
  auto d0 = check_abelian(AbelianSeed::d_y, 0, {});
  ASSERT_EQ(d0.size(), 1u);
  EXPECT_EQ(d0[0].status, Verdict::pass);
  for (AbelianSeed s : {AbelianSeed::d_y, AbelianSeed::scaling}) {
    for (const auto& r : check_abelian(s, 1, {parse("M")})) {
      EXPECT_NE(r.status, Verdict::fail) << r.name << ": " << r.details;
    }
  }
  EXPECT_EQ(apply_seed_operator(AbelianSeed::d_y, parse("X")), parse("X_y"));
  EXPECT_EQ(apply_seed_operator(AbelianSeed::scaling, parse("M")), Expr());
}

TEST(Identities, Examples) {
  for (const char* s : {"X", "M", "[X_y, M]", "J*M", "X_yb*X_z"}) {
    EXPECT_EQ(check_identity5(parse(s)).status, Verdict::pass) << s;
    EXPECT_EQ(check_zero_curvature(parse(s)).status, Verdict::pass) << s;
  }
}

TEST(Lax, SymbolicSignsForConstantWave) {
  // Psi = J c: Jinv Psi = c, so D_z c - lam [Jinv J_y, c] and lam [Jinv J_z, c];
  // on shell Jinv J_y = X_z and Jinv J_z = -X_yb.
  LaxSymbolic l = lax_residual_symbolic(parse("J*M"));
  EXPECT_TRUE(same_mod(l.first, parse("-lam*[X_z, M]"), K()));
  EXPECT_TRUE(same_mod(l.second, parse("-lam*[X_yb, M]"), K()));
  EXPECT_TRUE(reduce_mod(l.compatibility, K()).is_zero());

  LaxSymbolic zero = lax_residual_symbolic(Expr());
  EXPECT_TRUE(zero.first.is_zero());
  EXPECT_TRUE(zero.second.is_zero());
}

TEST(Scaling, AuditMatches) {
  ScalingAudit a = scaling_audit();
  EXPECT_TRUE(a.matches);
  EXPECT_EQ(a.symmetry.status, Verdict::pass);
  EXPECT_TRUE(same_mod(a.printed, parse("z*X_y - yb*X_z + y*Int_z(X_yy + [X_z, X_y])"), G()));
}

TEST(Conservation, SymbolicForLowMembers) {
  // D_yb(A_y a) + D_z(A_z a), a = Jinv Q, J-form connections
  Characteristic q = Q("J_y");
  for (int n = 0; n <= 2; ++n) {
    Expr a = Expr::jinv() * q.expr;
    Expr s = total_derivative(covariant_y(a, Connection::j_form), Coordinate::ybar) +
             total_derivative(covariant_z(a, Connection::j_form), Coordinate::z);
    EXPECT_EQ(verify_zero("conservation", s, {}).status, Verdict::pass) << n;
    q = recursion_T(q);
  }
}

TEST(Conservation, BacklundConsistencyModuloKernel) {
  // A_z(Jinv Q_n) + D_yb(Jinv Q_{n+1}) vanishes up to a z-independent term
  Characteristic q = Q("J*M");
  for (int n = 0; n <= 1; ++n) {
    Characteristic next = recursion_T(q);
    Expr r = covariant_z(Expr::jinv() * q.expr, Connection::j_form) +
             total_derivative(Expr::jinv() * next.expr, Coordinate::ybar);
    EXPECT_EQ(verify_zero("bt", r, modulo_kernel()).status, Verdict::pass) << n;
    q = next;
  }
}

// ---------------------------------------------------------------------------
// properties

TEST(OperatorProperty, RIsLinear) {
  std::mt19937_64 rng(31);
  gen::GenOptions opt;
  opt.depth = 2;
  for (int t = 0; t < 25; ++t) {
    Expr a = gen::random_expr(rng, opt);
    Expr b = gen::random_expr(rng, opt);
    Coefficient c(Rational(-2, 3));
    Expr lhs = recursion_R(Characteristic::on_x(a + c * b)).expr;
    Expr rhs = recursion_R(Characteristic::on_x(a)).expr + c * recursion_R(Characteristic::on_x(b)).expr;
    EXPECT_TRUE(reduce_mod(total_derivative(lhs - rhs, Coordinate::z), G()).is_zero());
  }
}

TEST(OperatorProperty, DzOfRIsCovariantDerivative) {
  std::mt19937_64 rng(32);
  gen::GenOptions opt;
  opt.depth = 2;
  opt.integrals = true;
  for (int t = 0; t < 25; ++t) {
    Expr phi = reduce_mod(gen::random_expr(rng, opt), G());
    Expr dz = total_derivative(recursion_R(Characteristic::on_x(phi)).expr, Coordinate::z);
    EXPECT_TRUE(same_mod(dz, covariant_y(phi), G())) << phi.to_string();
  }
}

TEST(OperatorProperty, BracketIsAntisymmetric) {
  std::mt19937_64 rng(33);
  gen::GenOptions opt;
  opt.depth = 2;
  opt.max_order = 1;
  for (int t = 0; t < 25; ++t) {
    Characteristic a = Characteristic::on_x(gen::random_expr(rng, opt));
    Characteristic b = Characteristic::on_x(gen::random_expr(rng, opt));
    EXPECT_TRUE(same_mod(lie_bracket(a, b).expr, -lie_bracket(b, a).expr, G()));
  }
}

TEST(OperatorProperty, RandomProbesAreDeterministic) {
  std::mt19937_64 r1(99);
  std::mt19937_64 r2(99);
  ProbeOptions opt;
  for (int t = 0; t < 20; ++t) EXPECT_EQ(random_probe(r1, opt), random_probe(r2, opt));
}

TEST(OperatorProperty, CovariantIdentitiesOnRandomProbes) {
  std::mt19937_64 rng(34);
  ProbeOptions opt;
  opt.allow_j = true;
  for (int t = 0; t < 25; ++t) {
    Expr e = random_probe(rng, opt);
    EXPECT_EQ(check_identity5(e).status, Verdict::pass) << e.to_string();
    EXPECT_EQ(check_zero_curvature(e).status, Verdict::pass) << e.to_string();
  }
}
