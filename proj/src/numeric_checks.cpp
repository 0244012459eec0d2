#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sdym/calculus.hpp"
#include "sdym/numeric.hpp"

namespace sdym::numeric {

namespace {

double field_norm(const Expr& e, const NumericSolution& sol) {
  EvalMode mode = default_mode(sol);
  EvalOptions opt;
  opt.mode = mode;
  return max_norm(eval_expr(e, sol, opt).values, sol.grid, default_margin(mode));
}

}  // namespace

double residual_F(const NumericSolution& sol) { return field_norm(sdym3_lhs(), sol); }

double residual_G(const NumericSolution& sol) { return field_norm(psdym3_lhs(), sol); }

double bt_residual(const NumericSolution& sol) {
  Expr first = connection_y(Connection::j_form) - connection_y(Connection::x_form);
  Expr second = connection_z(Connection::j_form) - connection_z(Connection::x_form);
  return std::max(field_norm(first, sol), field_norm(second, sol));
}

double max_det_deviation(const NumericSolution& sol) {
  if (!sol.j) throw std::invalid_argument("solution has no J field");
  double worst = 0;
  for (const auto& m : *sol.j) worst = std::max(worst, std::abs(m.determinant() - 1.0));
  return worst;
}

double max_trace(const NumericSolution& sol) {
  if (!sol.x) throw std::invalid_argument("solution has no X field");
  double worst = 0;
  for (const auto& m : *sol.x) worst = std::max(worst, std::abs(m.trace()));
  return worst;
}

NumericSolution perturb_j(const NumericSolution& sol, double amplitude, unsigned seed) {
  if (!sol.j) throw std::invalid_argument("solution has no J field");
  NumericSolution out = sol;
  out.closed_form.reset();
  out.provenance += " + perturbed J (amplitude " + std::to_string(amplitude) + ", seed " +
                    std::to_string(seed) + ")";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& m : *out.j) {
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c) m(r, c) += amplitude * Complex(u(rng), u(rng));
    }
  }
  return out;
}

LaxResidual lax_residual(const NumericSolution& sol, const Matrix& h, double a, Complex lam) {
  if (!sol.closed_form) throw std::invalid_argument("lax residual needs a closed-form solution");
  const ClosedForm& cf = *sol.closed_form;
  LaxResidual r;
  auto comm = [](const Matrix& x, const Matrix& y) -> Matrix { return x * y - y * x; };
  for (std::size_t p = 0; p < sol.grid.size(); ++p) {
    Point pt = sol.grid.point(p);
    Complex phase = std::exp(a * (pt.y + lam * pt.z - lam * lam * pt.ybar));
    Matrix w = phase * h;
    Matrix wy = a * w;
    Matrix wz = (a * lam) * w;
    Matrix wyb = (-a * lam * lam) * w;
    Matrix wzz = (a * lam) * wz;
    Matrix wyyb = a * wyb;

    Matrix jinv = cf.jinv(pt);
    Matrix jy = cf.j({1, 0, 0}, pt);
    Matrix jz = cf.j({0, 1, 0}, pt);
    Matrix jyb = cf.j({0, 0, 1}, pt);
    Matrix ay = jinv * jy;
    Matrix az = jinv * jz;
    Matrix ay_yb = -jinv * jyb * jinv * jy + jinv * cf.j({1, 0, 1}, pt);
    Matrix az_z = -jinv * jz * jinv * jz + jinv * cf.j({0, 2, 0}, pt);

    Matrix first = wz - lam * (wy + comm(ay, w));
    Matrix second = wyb + lam * (wz + comm(az, w));
    Matrix compat = wyyb + comm(ay_yb, w) + comm(ay, wyb) + wzz + comm(az_z, w) + comm(az, wz);
    r.first = std::max(r.first, first.norm());
    r.second = std::max(r.second, second.norm());
    r.compatibility = std::max(r.compatibility, compat.norm());
  }
  return r;
}

double conservation_residual(const NumericSolution& sol, const Expr& q, const EvalOptions& opt) {
  Expr a = Expr::jinv() * q;
  Expr s = total_derivative(covariant_y(a, Connection::j_form), Coordinate::ybar) +
           total_derivative(covariant_z(a, Connection::j_form), Coordinate::z);
  return max_norm(eval_expr(s, sol, opt).values, sol.grid, default_margin(opt.mode));
}

double convergence_order(const std::function<double(const Grid&)>& check,
                         const std::vector<Grid>& grids) {
  if (grids.size() < 3) throw std::invalid_argument("convergence_order needs at least 3 grids");
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& g : grids) {
    double r = check(g);
    if (!(r > 0) || !std::isfinite(r)) return 0.0;
    lx.push_back(std::log(g.h(1)));
    ly.push_back(std::log(r));
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double designated_fd_check(const std::string& name, const Grid& grid) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = -1.0;
  NumericSolution sol = make_abelian_solution(h, grid);
  sol.closed_form.reset();
  EvalOptions opt;
  opt.mode = EvalMode::finite_difference;
  if (name == "int-z") {
    Expr e = Expr::raw_integral(Expr::j({1, 1, 0})) - Expr::j({1, 0, 0});
    Field f = subtract_first_plane(eval_expr(e, sol, opt).values, grid);
    return max_norm(f, grid, default_margin(opt.mode));
  }
  if (name == "conservation") return conservation_residual(sol, Expr::j({1, 0, 0}), opt);
  throw std::invalid_argument("unknown finite-difference check '" + name + "'");
}

std::vector<Grid> halving_grids(int n, int count) {
  std::vector<Grid> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(Grid::cube(n));
    n = 2 * n - 1;
  }
  return out;
}

// ---------------------------------------------------------------------------

void write_snapshot(std::ostream& os, const NumericSolution& sol) {
  const Grid& g = sol.grid;
  os << "SDYM-SNAPSHOT 1\n";
  os << "dimension " << sol.dimension << "\n";
  os << std::setprecision(17);
  os << "grid";
  for (int a = 0; a < 3; ++a) os << " " << g.n(a);
  for (int a = 0; a < 3; ++a) os << " " << g.lo(a);
  for (int a = 0; a < 3; ++a) os << " " << g.h(a);
  os << "\n";
  os << "provenance " << (sol.provenance.empty() ? "unspecified" : sol.provenance) << "\n";
  auto dump = [&](const char* tag, const Field& f) {
    os << "field " << tag << "\n";
    for (const auto& m : f) {
      bool first = true;
      for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
          os << (first ? "" : " ") << m(r, c).real() << " " << m(r, c).imag();
          first = false;
        }
      }
      os << "\n";
    }
  };
  if (sol.x) dump("X", *sol.x);
  if (sol.j) dump("J", *sol.j);
  os << "end\n";
}

NumericSolution read_snapshot(std::istream& is) {
  auto bad = [](const std::string& what) {
    return std::invalid_argument("malformed snapshot: " + what);
  };
  std::string word;
  int version = 0;
  if (!(is >> word >> version) || word != "SDYM-SNAPSHOT" || version != 1) throw bad("header");
  NumericSolution sol;
  if (!(is >> word >> sol.dimension) || word != "dimension" || sol.dimension < 1) {
    throw bad("dimension");
  }
  std::array<int, 3> n{};
  std::array<double, 3> lo{};
  std::array<double, 3> h{};
  if (!(is >> word) || word != "grid") throw bad("grid");
  for (auto& v : n) is >> v;
  for (auto& v : lo) is >> v;
  for (auto& v : h) is >> v;
  if (!is) throw bad("grid");
  std::array<double, 3> hi{};
  for (std::size_t a = 0; a < 3; ++a) hi[a] = lo[a] + h[a] * (n[a] - 1);
  sol.grid = Grid(n, lo, hi);
  if (!(is >> word) || word != "provenance") throw bad("provenance");
  std::getline(is >> std::ws, sol.provenance);
  const int d = sol.dimension;
  while (is >> word && word != "end") {
    if (word != "field") throw bad("expected field");
    std::string tag;
    is >> tag;
    Field f(sol.grid.size(), Matrix(d, d));
    for (auto& m : f) {
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
          double re = 0, im = 0;
          if (!(is >> re >> im)) throw bad("truncated field " + tag);
          m(r, c) = Complex(re, im);
        }
      }
    }
    if (tag == "X") {
      sol.x = std::move(f);
    } else if (tag == "J") {
      sol.j = std::move(f);
    } else {
      throw bad("unknown field " + tag);
    }
  }
  if (word != "end") throw bad("missing end");
  return sol;
}

}  // namespace sdym::numeric
