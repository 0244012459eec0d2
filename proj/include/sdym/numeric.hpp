#pragma once

#include <array>
#include <complex>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdym/expr.hpp"

namespace sdym::numeric {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

struct Point {
  double y = 0;
  double z = 0;
  double ybar = 0;

  double operator[](int axis) const { return axis == 0 ? y : axis == 1 ? z : ybar; }
  double& operator[](int axis) { return axis == 0 ? y : axis == 1 ? z : ybar; }
};

/// Uniform tensor grid on a real slice of (y, z, ybar). Points are indexed
/// row-major with ybar fastest.
class Grid {
 public:
  Grid(std::array<int, 3> n, std::array<double, 3> lo, std::array<double, 3> hi);
  static Grid cube(int n, double lo = -1.0, double hi = 1.0);

  int n(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  double lo(int axis) const { return lo_[static_cast<std::size_t>(axis)]; }
  double h(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
  double coord(int axis, int i) const { return lo(axis) + h(axis) * i; }
  std::size_t size() const;
  std::size_t index(int iy, int iz, int iyb) const;
  std::size_t stride(int axis) const;
  Point point(int iy, int iz, int iyb) const;
  Point point(std::size_t flat) const;
  std::array<int, 3> indices(std::size_t flat) const;

 private:
  std::array<int, 3> n_;
  std::array<double, 3> lo_;
  std::array<double, 3> h_;
};

using Field = std::vector<Matrix>;

/// A sampled matrix field together with the text of what produced it.
struct NumericField {
  std::string name;
  Field values;
};

/// Real polynomial in (y, z, ybar).
class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial constant(double c);
  static Polynomial monomial(double c, std::array<int, 3> exps);

  double operator()(const Point& p) const;
  Polynomial derivative(int axis) const;
  bool is_zero() const { return terms_.empty(); }

  Polynomial& operator+=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  std::map<std::array<int, 3>, double> terms_;
};

/// Closed-form pair with X = sum_i p_i(x) K_i and J = exp(s(x) A); every jet
/// is available analytically.
class ClosedForm {
 public:
  ClosedForm(std::vector<std::pair<Polynomial, Matrix>> x_terms, Polynomial s, Matrix a);

  int dimension() const { return static_cast<int>(a_.rows()); }
  Matrix x(const MultiIndex& d, const Point& p) const;
  Matrix j(const MultiIndex& d, const Point& p) const;
  Matrix jinv(const Point& p) const;

 private:
  const std::vector<Polynomial>& x_coefficients(const MultiIndex& d) const;
  const std::vector<Polynomial>& j_coefficients(const MultiIndex& d) const;

  std::vector<std::pair<Polynomial, Matrix>> x_terms_;
  Polynomial s_;
  Matrix a_;
  mutable std::mutex mutex_;
  mutable std::map<MultiIndex, std::vector<Polynomial>> x_cache_;
  mutable std::map<MultiIndex, std::vector<Polynomial>> j_cache_;
};

/// Grid samples of an (X, J) pair connected by the Baecklund relations.
struct NumericSolution {
  int dimension = 2;
  Grid grid = Grid::cube(16);
  std::string provenance;
  std::optional<Field> x;
  std::optional<Field> j;
  /// Present for the built-in families; absent once fields are modified.
  std::shared_ptr<const ClosedForm> closed_form;
  /// Bindings for named constant matrices.
  std::map<std::string, Matrix> constants;
};

/// X = H (y ybar - z^2/2), J = exp(-y z H). Throws std::invalid_argument if
/// tr H != 0.
NumericSolution make_abelian_solution(const Matrix& h, const Grid& grid);

/// X = q(y) K + (z + f(ybar)) C with q = y + y^2, f = ybar + ybar^2/2, and
/// J = exp((y - z f'(ybar)) C). Requires [C, C] = 0 trivially; X_z and X_ybar
/// commute, so G[X] = 0, while [X_y, X_z] = q'[K, C] is generically nonzero.
NumericSolution make_shear_solution(const Matrix& k, const Matrix& c, const Grid& grid);

/// Parses "diag(a,b,...)" or a row list "[[a,b],[c,d]]"; entries are real or
/// a+bi complex literals.
Matrix parse_matrix(const std::string& text);

enum class EvalMode { analytic, finite_difference };

struct EvalOptions {
  EvalMode mode = EvalMode::analytic;
  Complex lambda = 0.0;
  int gauss_nodes = 16;
};

/// Evaluates e on every grid point. Analytic mode uses the closed form and
/// Gauss-Legendre quadrature from the first z-plane for Int_z; finite-
/// difference mode uses second-order stencils on the sampled fields and
/// cumulative trapezoidal integration with the first z-plane set to zero.
/// Throws std::invalid_argument for unbound constants or missing fields.
NumericField eval_expr(const Expr& e, const NumericSolution& sol, const EvalOptions& opt = {});

/// Analytic pointwise evaluation.
Matrix eval_at(const Expr& e, const NumericSolution& sol, const Point& p,
               const EvalOptions& opt = {});

/// max over points at least margin away from each boundary of the Frobenius norm.
double max_norm(const Field& f, const Grid& g, int margin = 0);

/// Subtracts from every point the value on the first z-plane with the same
/// (y, ybar), quotienting out z-independent offsets.
Field subtract_first_plane(const Field& f, const Grid& g);

/// Analytic mode when a closed form is present, finite differences otherwise.
EvalMode default_mode(const NumericSolution& sol);
/// Margin used for norms. Boundary stencils are second order as well, so the
/// whole (fixed) domain is used; an index margin would let the measured region
/// grow with refinement and bias convergence orders.
int default_margin(EvalMode mode);

double residual_F(const NumericSolution& sol);
double residual_G(const NumericSolution& sol);
double bt_residual(const NumericSolution& sol);
double max_det_deviation(const NumericSolution& sol);
double max_trace(const NumericSolution& sol);

/// Adds amplitude * (random complex field) to J and drops the closed form.
NumericSolution perturb_j(const NumericSolution& sol, double amplitude, unsigned seed);

struct LaxResidual {
  double first = 0;
  double second = 0;
  double compatibility = 0;
};

/// Both Lax equations for Psi = J W, W = H exp(a (y + lam z - lam^2 ybar)),
/// on the abelian family with matrix h.
LaxResidual lax_residual(const NumericSolution& sol, const Matrix& h, double a, Complex lam);

/// max norm of (D_ybar A_y + D_z A_z)(Jinv Q) with J-form connections.
double conservation_residual(const NumericSolution& sol, const Expr& q, const EvalOptions& opt);

/// Least-squares slope of log(residual) against log(h_z).
double convergence_order(const std::function<double(const Grid&)>& check,
                         const std::vector<Grid>& grids);

/// FD-limited checks with a known second-order error.
/// "int-z": Int_z(J_yz) - J_y on the abelian family, offsets quotiented.
/// "conservation": conservation residual of Q = J_y on the abelian family.
double designated_fd_check(const std::string& name, const Grid& grid);

/// Grids of n, 2n-1, 4n-3 points per axis on [-1, 1]^3 (spacing h, h/2, h/4).
std::vector<Grid> halving_grids(int n, int count = 3);

/// Text snapshot; layout documented in the README.
void write_snapshot(std::ostream& os, const NumericSolution& sol);
NumericSolution read_snapshot(std::istream& is);

}  // namespace sdym::numeric
