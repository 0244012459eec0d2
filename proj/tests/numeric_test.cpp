#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sdym/calculus.hpp"
#include "sdym/numeric.hpp"
#include "support.hpp"

using namespace sdym;
using namespace sdym::numeric;

namespace {

Matrix H() { return parse_matrix("diag(1,-1)"); }
Matrix C() { return parse_matrix("[[0,1],[0,0]]"); }

NumericSolution abelian(int n = 16) { return make_abelian_solution(H(), Grid::cube(n)); }

}  // namespace

TEST(Grid, IndexingIsRowMajorWithYbarFastest) {
  Grid g = Grid::cube(5);
  EXPECT_EQ(g.size(), 125u);
  EXPECT_EQ(g.stride(2), 1u);
  EXPECT_EQ(g.stride(1), 5u);
  EXPECT_EQ(g.index(1, 2, 3), 25u + 10u + 3u);
  auto i = g.indices(g.index(4, 0, 2));
  EXPECT_EQ(i, (std::array<int, 3>{4, 0, 2}));
  EXPECT_DOUBLE_EQ(g.h(0), 0.5);
  EXPECT_DOUBLE_EQ(g.point(4, 0, 2).y, 1.0);
}

TEST(ParseMatrix, Forms) {
  Matrix d = parse_matrix("diag(1, -1)");
  EXPECT_EQ(d.rows(), 2);
  EXPECT_EQ(d(1, 1), Complex(-1.0));
  Matrix m = parse_matrix("[[1, 2+3i], [-i, 0.5]]");
  EXPECT_EQ(m(0, 1), Complex(2.0, 3.0));
  EXPECT_EQ(m(1, 0), Complex(0.0, -1.0));
  EXPECT_THROW(parse_matrix("[[1,2],[3]]"), std::invalid_argument);
  EXPECT_THROW(parse_matrix("diag(1,"), std::invalid_argument);
}

TEST(Families, RejectTraceful) {
  EXPECT_THROW(make_abelian_solution(parse_matrix("diag(1,1)"), Grid::cube(6)), std::invalid_argument);
}

TEST(Families, AbelianResidualsAtFloor) {
  for (int n : {6, 16}) {
    NumericSolution sol = abelian(n);
    EXPECT_LT(residual_F(sol), 1e-10);
    EXPECT_LT(residual_G(sol), 1e-10);
    EXPECT_LT(bt_residual(sol), 1e-10);
    EXPECT_LT(max_det_deviation(sol), 1e-10);
    EXPECT_LT(max_trace(sol), 1e-12);
  }
}

TEST(Families, ZeroHIsTrivial) {
  NumericSolution sol = make_abelian_solution(Matrix::Zero(2, 2), Grid::cube(6));
  EXPECT_EQ(residual_F(sol), 0.0);
  EXPECT_EQ(residual_G(sol), 0.0);
  EXPECT_EQ(bt_residual(sol), 0.0);
  for (const auto& m : *sol.x) EXPECT_EQ(m.norm(), 0.0);
  for (const auto& m : *sol.j) EXPECT_EQ((m - Matrix::Identity(2, 2)).norm(), 0.0);
}

TEST(Families, ShearIsNonabelianSolution) {
  NumericSolution sol = make_shear_solution(H(), C(), Grid::cube(8));
  EXPECT_LT(residual_F(sol), 1e-10);
  EXPECT_LT(residual_G(sol), 1e-10);
  EXPECT_LT(bt_residual(sol), 1e-10);
  // [X_y, X_z] does not vanish, so commutator terms are exercised
  Field f = eval_expr(parse("[X_y, X_z]"), sol).values;
  EXPECT_GT(max_norm(f, sol.grid), 0.1);
}

TEST(Families, ClosedFormJetsMatchFiniteDifferences) {
  // oracle: second-order FD of the sampled fields, error ~ h^2
  NumericSolution sol = make_shear_solution(H(), C(), Grid::cube(21));
  NumericSolution fd = sol;
  fd.closed_form.reset();
  EvalOptions f;
  f.mode = EvalMode::finite_difference;
  for (const char* e : {"J_y", "J_zyb", "X_yy", "J_zz"}) {
    Field a = eval_expr(parse(e), sol).values;
    Field b = eval_expr(parse(e), fd, f).values;
    Field d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    EXPECT_LT(max_norm(d, sol.grid), 0.05) << e;
  }
}

TEST(Eval, Examples) {
  NumericSolution sol = abelian();
  sol.constants["M"] = H();
  EXPECT_LT(max_norm(eval_expr(psdym3_lhs(), sol).values, sol.grid), 1e-10);
  EXPECT_EQ(max_norm(eval_expr(parse("[X, M]"), sol).values, sol.grid), 0.0);
  EXPECT_THROW(eval_expr(parse("N"), sol), std::invalid_argument);
}

TEST(Eval, IntegralMatchesUpToOffsetInFdMode) {
  NumericSolution sol = abelian();
  sol.closed_form.reset();
  EvalOptions f;
  f.mode = EvalMode::finite_difference;
  Field d = eval_expr(Expr::raw_integral(parse("X_yz")) - parse("X_y"), sol, f).values;
  double h = sol.grid.h(1);
  EXPECT_LT(max_norm(subtract_first_plane(d, sol.grid), sol.grid), 10 * h * h);
}

TEST(Eval, AnalyticIntegralStartsAtFirstPlane) {
  NumericSolution sol = abelian(6);
  // Int_z(X_z) evaluated by quadrature equals X - X(z0)
  Field a = eval_expr(Expr::raw_integral(parse("X_z")), sol).values;
  Field x = eval_expr(parse("X"), sol).values;
  Field d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - x[i];
  EXPECT_LT(max_norm(subtract_first_plane(d, sol.grid), sol.grid), 1e-12);
}

TEST(Residuals, PerturbedJIsDetected) {
  NumericSolution p = perturb_j(abelian(), 1e-3, 7);
  EXPECT_FALSE(p.closed_form);
  double r = residual_F(p);
  EXPECT_GT(r, 0.0);
  EXPECT_TRUE(std::isfinite(r));
}

TEST(Lax, ResidualsVanishOnAbelianWaves) {
  NumericSolution sol = abelian();
  for (auto [a, lam] : {std::pair{1.0, 0.5}, std::pair{1.0, -1.0}, std::pair{2.0, 0.25}, std::pair{0.0, 0.7},
                        std::pair{1.5, 0.0}}) {
    LaxResidual r = lax_residual(sol, H(), a, lam);
    EXPECT_LT(r.first, 1e-8);
    EXPECT_LT(r.second, 1e-8);
    EXPECT_LT(r.compatibility, 1e-8);
  }
}

TEST(Lax, WrongWaveIsDetected) {
  NumericSolution sol = abelian();
  // W must satisfy D_z W = lam D_y W; a z-independent wave with lam != 0 does not
  LaxResidual r = lax_residual(sol, H(), 1.0, Complex(0.5, 0.5));
  EXPECT_LT(r.first, 1e-8);  // complex lam is still a solution
  NumericSolution fd = perturb_j(sol, 1e-3, 1);
  EXPECT_THROW(lax_residual(fd, H(), 1.0, 0.5), std::invalid_argument);
}

TEST(Conservation, Examples) {
  NumericSolution sol = abelian();
  NumericSolution fd = sol;
  fd.closed_form.reset();
  EvalOptions f;
  f.mode = EvalMode::finite_difference;
  double h = sol.grid.h(1);
  EXPECT_LT(conservation_residual(fd, parse("J_y"), f), 10 * h * h);
  sol.constants["M"] = H();
  EXPECT_LT(conservation_residual(sol, parse("J*M"), {}), 1e-12);
  // Q = J z^2: a = z^2, the residual is D_z D_z z^2 = 2 I, Frobenius norm 2 sqrt 2
  EXPECT_NEAR(conservation_residual(sol, parse("J*z*z"), {}), 2.0 * std::sqrt(2.0), 1e-9);
}

TEST(Convergence, DesignatedChecksAreSecondOrder) {
  auto grids = halving_grids(11, 3);
  ASSERT_EQ(grids.size(), 3u);
  EXPECT_NEAR(grids[2].h(1), grids[0].h(1) / 4, 1e-15);
  for (const char* n : {"int-z", "conservation"}) {
    double p = convergence_order([&](const Grid& g) { return designated_fd_check(n, g); }, grids);
    EXPECT_NEAR(p, 2.0, 0.3) << n;
  }
  EXPECT_THROW(designated_fd_check("made-up", grids[0]), std::invalid_argument);
}

TEST(Convergence, OrderOfInconsistentCheckIsZero) {
  auto grids = halving_grids(9, 3);
  EXPECT_NEAR(convergence_order([](const Grid&) { return 0.25; }, grids), 0.0, 1e-12);
  EXPECT_EQ(convergence_order([](const Grid&) { return 0.0; }, grids), 0.0);
  EXPECT_THROW(convergence_order([](const Grid&) { return 1.0; }, {grids[0]}), std::invalid_argument);
}

TEST(Snapshot, RoundTrip) {
  NumericSolution sol = make_shear_solution(H(), C(), Grid::cube(5));
  std::stringstream ss;
  write_snapshot(ss, sol);
  NumericSolution back = read_snapshot(ss);
  EXPECT_EQ(back.provenance, sol.provenance);
  EXPECT_EQ(back.grid.size(), sol.grid.size());
  EXPECT_DOUBLE_EQ(back.grid.h(2), sol.grid.h(2));
  ASSERT_TRUE(back.x && back.j);
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    EXPECT_LT(((*back.j)[i] - (*sol.j)[i]).norm(), 1e-15);
    EXPECT_LT(((*back.x)[i] - (*sol.x)[i]).norm(), 1e-15);
  }

  std::stringstream bad("SDYM-SNAPSHOT 2\n");
  EXPECT_THROW(read_snapshot(bad), std::invalid_argument);
  std::stringstream truncated("SDYM-SNAPSHOT 1\ndimension 2\ngrid 2 2 2 0 0 0 1 1 1\nprovenance x\nfield J\n1 0\n");
  EXPECT_THROW(read_snapshot(truncated), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// properties

TEST(NumericProperty, EvalIsLinear) {
  std::mt19937_64 rng(41);
  gen::GenOptions opt;
  opt.integrals = true;
  NumericSolution sol = make_shear_solution(H(), C(), Grid::cube(5));
  sol.constants["M"] = parse_matrix("[[0.2,1],[0.3,-0.2]]");
  sol.constants["N"] = parse_matrix("[[0,2],[1i,0]]");
  for (int t = 0; t < 20; ++t) {
    Expr a = gen::random_expr(rng, opt);
    Expr b = gen::random_expr(rng, opt);
    Coefficient c(Rational(3, 2), Rational(-1));
    Field lhs = eval_expr(c * a + b, sol).values;
    Field fa = eval_expr(a, sol).values;
    Field fb = eval_expr(b, sol).values;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      Matrix d = lhs[i] - (Complex(1.5, -1.0) * fa[i] + fb[i]);
      EXPECT_LT(d.norm(), 1e-9 * (1 + fa[i].norm() + fb[i].norm()));
    }
  }
}

TEST(NumericProperty, SymbolicDerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(42);
  gen::GenOptions opt;
  opt.depth = 2;
  opt.max_order = 1;
  NumericSolution sol = make_shear_solution(H(), C(), Grid::cube(21));
  sol.constants["M"] = parse_matrix("[[0.2,1],[0.3,-0.2]]");
  sol.constants["N"] = parse_matrix("[[0,2],[1,0]]");
  for (int t = 0; t < 15; ++t) {
    Expr e = gen::random_expr(rng, opt);
    Coordinate dir = kCoordinates[static_cast<std::size_t>(t % 3)];
    Field exact = eval_expr(total_derivative(e, dir), sol).values;
    // FD of the sampled expression: store it as a field and differentiate
    NumericSolution probe = sol;
    probe.closed_form.reset();
    probe.x = eval_expr(e, sol).values;
    EvalOptions f;
    f.mode = EvalMode::finite_difference;
    MultiIndex d{0, 0, 0};
    d[static_cast<std::size_t>(index_of(dir))] = 1;
    Field approx = eval_expr(Expr::x(d), probe, f).values;
    Field diff(exact.size());
    double scale = 1;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      diff[i] = exact[i] - approx[i];
      scale = std::max(scale, exact[i].norm());
    }
    double h = sol.grid.h(0);
    EXPECT_LT(max_norm(diff, sol.grid), 30 * h * h * scale) << e.to_string();
  }
}

TEST(NumericProperty, DzOfCumulativeIntegralRecoversIntegrand) {
  NumericSolution sol = make_shear_solution(H(), C(), Grid::cube(21));
  NumericSolution fd = sol;
  fd.closed_form.reset();
  EvalOptions f;
  f.mode = EvalMode::finite_difference;
  const double h = sol.grid.h(1);
  for (const char* e : {"X_y*X_z", "J_y*X", "[X_yy, X]"}) {
    Expr inner = parse(e);
    NumericSolution p = fd;
    p.x = eval_expr(Expr::raw_integral(inner), fd, f).values;
    Field back = eval_expr(Expr::x({0, 1, 0}), p, f).values;
    Field want = eval_expr(inner, fd, f).values;
    double worst = 0;
    for (std::size_t i = 0; i < back.size(); ++i) {
      auto k = sol.grid.indices(i);
      if (k[1] == 0 || k[1] == sol.grid.n(1) - 1) continue;
      worst = std::max(worst, (back[i] - want[i]).norm());
    }
    EXPECT_LT(worst, 20 * h * h) << e;
  }
}
