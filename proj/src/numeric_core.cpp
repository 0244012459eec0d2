#include <cctype>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "sdym/numeric.hpp"

namespace sdym::numeric {

Grid::Grid(std::array<int, 3> n, std::array<double, 3> lo, std::array<double, 3> hi)
    : n_(n), lo_(lo) {
  for (std::size_t a = 0; a < 3; ++a) {
    if (n[a] < 2) throw std::invalid_argument("grid axis needs at least 2 points");
    if (!(hi[a] > lo[a])) throw std::invalid_argument("grid axis with non-positive extent");
    h_[a] = (hi[a] - lo[a]) / (n[a] - 1);
  }
}

Grid Grid::cube(int n, double lo, double hi) { return Grid({n, n, n}, {lo, lo, lo}, {hi, hi, hi}); }

std::size_t Grid::size() const {
  return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]) *
         static_cast<std::size_t>(n_[2]);
}

std::size_t Grid::stride(int axis) const {
  if (axis == 2) return 1;
  if (axis == 1) return static_cast<std::size_t>(n_[2]);
  return static_cast<std::size_t>(n_[1]) * static_cast<std::size_t>(n_[2]);
}

std::size_t Grid::index(int iy, int iz, int iyb) const {
  return static_cast<std::size_t>(iy) * stride(0) + static_cast<std::size_t>(iz) * stride(1) +
         static_cast<std::size_t>(iyb);
}

Point Grid::point(int iy, int iz, int iyb) const {
  return {coord(0, iy), coord(1, iz), coord(2, iyb)};
}

std::array<int, 3> Grid::indices(std::size_t flat) const {
  int iyb = static_cast<int>(flat % static_cast<std::size_t>(n_[2]));
  flat /= static_cast<std::size_t>(n_[2]);
  int iz = static_cast<int>(flat % static_cast<std::size_t>(n_[1]));
  int iy = static_cast<int>(flat / static_cast<std::size_t>(n_[1]));
  return {iy, iz, iyb};
}

Point Grid::point(std::size_t flat) const {
  auto i = indices(flat);
  return point(i[0], i[1], i[2]);
}

// ---------------------------------------------------------------------------

Polynomial Polynomial::constant(double c) { return monomial(c, {0, 0, 0}); }

Polynomial Polynomial::monomial(double c, std::array<int, 3> exps) {
  Polynomial p;
  if (c != 0.0) p.terms_[exps] = c;
  return p;
}

double Polynomial::operator()(const Point& p) const {
  double s = 0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (int a = 0; a < 3; ++a) {
      for (int k = 0; k < e[static_cast<std::size_t>(a)]; ++k) t *= p[a];
    }
    s += t;
  }
  return s;
}

Polynomial Polynomial::derivative(int axis) const {
  Polynomial r;
  for (const auto& [e, c] : terms_) {
    int k = e[static_cast<std::size_t>(axis)];
    if (k == 0) continue;
    auto f = e;
    f[static_cast<std::size_t>(axis)] -= 1;
    r.terms_[f] += c * k;
  }
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) {
    double v = terms_[e] + c;
    if (v == 0.0) {
      terms_.erase(e);
    } else {
      terms_[e] = v;
    }
  }
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      std::array<int, 3> e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]};
      r += Polynomial::monomial(ca * cb, e);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

Polynomial differentiate(const Polynomial& p, const MultiIndex& d) {
  Polynomial r = p;
  for (int a = 0; a < 3; ++a) {
    for (int k = 0; k < d[static_cast<std::size_t>(a)]; ++k) r = r.derivative(a);
  }
  return r;
}

}  // namespace

ClosedForm::ClosedForm(std::vector<std::pair<Polynomial, Matrix>> x_terms, Polynomial s, Matrix a)
    : x_terms_(std::move(x_terms)), s_(std::move(s)), a_(std::move(a)) {}

const std::vector<Polynomial>& ClosedForm::x_coefficients(const MultiIndex& d) const {
  std::lock_guard lock(mutex_);
  auto it = x_cache_.find(d);
  if (it != x_cache_.end()) return it->second;
  std::vector<Polynomial> c;
  for (const auto& term : x_terms_) c.push_back(differentiate(term.first, d));
  return x_cache_.emplace(d, std::move(c)).first->second;
}

const std::vector<Polynomial>& ClosedForm::j_coefficients(const MultiIndex& d) const {
  std::lock_guard lock(mutex_);
  auto it = j_cache_.find(d);
  if (it != j_cache_.end()) return it->second;
  // D^d exp(sA) = (sum_k c_k A^k) exp(sA); D_a maps c_k to
  // D_a c_k + (D_a s) c_{k-1}.
  std::vector<Polynomial> c{Polynomial::constant(1.0)};
  for (int axis = 0; axis < 3; ++axis) {
    Polynomial ds = s_.derivative(axis);
    for (int step = 0; step < d[static_cast<std::size_t>(axis)]; ++step) {
      std::vector<Polynomial> next(c.size() + 1);
      for (std::size_t k = 0; k < c.size(); ++k) {
        next[k] += c[k].derivative(axis);
        next[k + 1] += ds * c[k];
      }
      c = std::move(next);
    }
  }
  return j_cache_.emplace(d, std::move(c)).first->second;
}

Matrix ClosedForm::x(const MultiIndex& d, const Point& p) const {
  const int n = dimension();
  Matrix r = Matrix::Zero(n, n);
  const auto& coeffs = x_coefficients(d);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    double c = coeffs[i](p);
    if (c != 0.0) r += c * x_terms_[i].second;
  }
  return r;
}

Matrix ClosedForm::j(const MultiIndex& d, const Point& p) const {
  const int n = dimension();
  Matrix poly = Matrix::Zero(n, n);
  Matrix power = Matrix::Identity(n, n);
  for (const auto& ck : j_coefficients(d)) {
    double v = ck(p);
    if (v != 0.0) poly += v * power;
    power = power * a_;
  }
  Matrix e = (Complex(s_(p)) * a_).exp();
  return poly * e;
}

Matrix ClosedForm::jinv(const Point& p) const { return (Complex(-s_(p)) * a_).exp(); }

// ---------------------------------------------------------------------------

namespace {

Field sample(const Grid& g, const std::function<Matrix(const Point&)>& f) {
  Field out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.point(i));
  return out;
}

NumericSolution from_closed_form(std::shared_ptr<const ClosedForm> cf, const Grid& g,
                                 std::string provenance) {
  NumericSolution sol;
  sol.dimension = cf->dimension();
  sol.grid = g;
  sol.provenance = std::move(provenance);
  sol.x = sample(g, [&](const Point& p) { return cf->x({0, 0, 0}, p); });
  sol.j = sample(g, [&](const Point& p) { return cf->j({0, 0, 0}, p); });
  sol.closed_form = std::move(cf);
  return sol;
}

std::string matrix_text(const Matrix& m) {
  std::ostringstream os;
  os << "[";
  for (int r = 0; r < m.rows(); ++r) {
    os << (r ? ",[" : "[");
    for (int c = 0; c < m.cols(); ++c) {
      if (c) os << ",";
      os << m(r, c).real();
      if (m(r, c).imag() != 0.0) os << (m(r, c).imag() > 0 ? "+" : "") << m(r, c).imag() << "i";
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

}  // namespace

NumericSolution make_abelian_solution(const Matrix& h, const Grid& grid) {
  if (h.rows() != h.cols()) throw std::invalid_argument("H must be square");
  if (std::abs(h.trace()) > 1e-12) throw std::invalid_argument("H must be traceless");
  Polynomial xp = Polynomial::monomial(1.0, {1, 0, 1}) + Polynomial::monomial(-0.5, {0, 2, 0});
  Polynomial s = Polynomial::monomial(-1.0, {1, 1, 0});
  auto cf = std::make_shared<const ClosedForm>(std::vector<std::pair<Polynomial, Matrix>>{{xp, h}},
                                              s, h);
  NumericSolution sol = from_closed_form(cf, grid, "abelian H=" + matrix_text(h));
  sol.constants["H"] = h;
  return sol;
}

NumericSolution make_shear_solution(const Matrix& k, const Matrix& c, const Grid& grid) {
  if (k.rows() != k.cols() || c.rows() != c.cols() || k.rows() != c.rows()) {
    throw std::invalid_argument("K and C must be square of equal size");
  }
  if (std::abs(k.trace()) > 1e-12 || std::abs(c.trace()) > 1e-12) {
    throw std::invalid_argument("K and C must be traceless");
  }
  Polynomial q = Polynomial::monomial(1.0, {1, 0, 0}) + Polynomial::monomial(1.0, {2, 0, 0});
  Polynomial w = Polynomial::monomial(1.0, {0, 1, 0}) + Polynomial::monomial(1.0, {0, 0, 1}) +
                 Polynomial::monomial(0.5, {0, 0, 2});
  Polynomial s = Polynomial::monomial(1.0, {1, 0, 0}) + Polynomial::monomial(-1.0, {0, 1, 0}) +
                 Polynomial::monomial(-1.0, {0, 1, 1});
  auto cf = std::make_shared<const ClosedForm>(
      std::vector<std::pair<Polynomial, Matrix>>{{q, k}, {w, c}}, s, c);
  NumericSolution sol =
      from_closed_form(cf, grid, "shear K=" + matrix_text(k) + " C=" + matrix_text(c));
  sol.constants["K"] = k;
  sol.constants["C"] = c;
  return sol;
}

// ---------------------------------------------------------------------------

namespace {

Complex parse_complex(const std::string& raw) {
  std::string s;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  if (s.empty()) throw std::invalid_argument("empty matrix entry");
  if (s.back() != 'i') return {std::stod(s), 0.0};
  s.pop_back();
  // split at the last sign that is not an exponent sign or leading
  std::size_t cut = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  auto imag = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return std::stod(t);
  };
  if (cut == std::string::npos) return {0.0, imag(s)};
  return {std::stod(s.substr(0, cut)), imag(s.substr(cut))};
}

std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '[' || ch == '(') ++depth;
    if (ch == ']' || ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  std::size_t b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

}  // namespace

Matrix parse_matrix(const std::string& text) {
  std::string t = strip(text);
  try {
    if (t.rfind("diag(", 0) == 0 && t.back() == ')') {
      auto parts = split_top(t.substr(5, t.size() - 6));
      const int n = static_cast<int>(parts.size());
      Matrix m = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i) m(i, i) = parse_complex(parts[static_cast<std::size_t>(i)]);
      return m;
    }
    if (t.size() >= 2 && t.front() == '[' && t.back() == ']') {
      auto rows = split_top(t.substr(1, t.size() - 2));
      const int n = static_cast<int>(rows.size());
      Matrix m(n, n);
      for (int r = 0; r < n; ++r) {
        std::string row = strip(rows[static_cast<std::size_t>(r)]);
        if (row.size() < 2 || row.front() != '[' || row.back() != ']') {
          throw std::invalid_argument("row must be bracketed");
        }
        auto cols = split_top(row.substr(1, row.size() - 2));
        if (static_cast<int>(cols.size()) != n) throw std::invalid_argument("matrix not square");
        for (int c = 0; c < n; ++c) m(r, c) = parse_complex(cols[static_cast<std::size_t>(c)]);
      }
      return m;
    }
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("malformed matrix '" + text + "': " + e.what());
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("malformed matrix '" + text + "'");
  }
  throw std::invalid_argument("malformed matrix '" + text + "'");
}

}  // namespace sdym::numeric
