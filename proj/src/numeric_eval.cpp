#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "sdym/numeric.hpp"

namespace sdym::numeric {

namespace {

// Fornberg's recursion: weights for the m-th derivative at 0 on nodes x.
std::vector<double> fornberg(const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  auto C = [&](int i, int k) -> double& {
    return c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  };
  double c1 = 1.0;
  double c4 = x[0];
  C(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0;
    double c5 = c4;
    c4 = x[static_cast<std::size_t>(i)];
    for (int j = 0; j < i; ++j) {
      double c3 = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
        C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
      C(j, 0) = c4 * C(j, 0) / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = C(i, m);
  return w;
}

// Second-order accurate m-th derivative along one axis.
Field fd_derivative(const Field& f, const Grid& g, int axis, int m) {
  if (m == 0) return f;
  const int n = g.n(axis);
  const int central = 2 * ((m + 1) / 2) + 1;
  const int r = central / 2;
  const int one_sided = m + 2;
  if (n < std::max(central, one_sided)) {
    throw std::invalid_argument("insufficient grid margin for derivative order " +
                                std::to_string(m));
  }
  const double scale = std::pow(g.h(axis), -m);
  std::map<std::pair<int, int>, std::vector<double>> cache;  // (start - i, size)
  auto weights = [&](int offset, int size) -> const std::vector<double>& {
    auto key = std::make_pair(offset, size);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<double> nodes(static_cast<std::size_t>(size));
    for (int k = 0; k < size; ++k) nodes[static_cast<std::size_t>(k)] = offset + k;
    auto w = fornberg(nodes, m);
    for (auto& v : w) v *= scale;
    return cache.emplace(key, std::move(w)).first->second;
  };

  Field out(f.size());
  const std::size_t stride = g.stride(axis);
  for (std::size_t p = 0; p < f.size(); ++p) {
    const int i = g.indices(p)[static_cast<std::size_t>(axis)];
    int start;
    int size;
    if (i - r >= 0 && i + r < n) {
      start = i - r;
      size = central;
    } else {
      size = one_sided;
      start = std::clamp(i - size / 2, 0, n - size);
    }
    const auto& w = weights(start - i, size);
    Matrix acc = Matrix::Zero(f[p].rows(), f[p].cols());
    const std::size_t base = p - static_cast<std::size_t>(i) * stride;
    for (int k = 0; k < size; ++k) {
      acc += w[static_cast<std::size_t>(k)] * f[base + static_cast<std::size_t>(start + k) * stride];
    }
    out[p] = std::move(acc);
  }
  return out;
}

Field cumulative_trapezoid_z(const Field& f, const Grid& g) {
  Field out(f.size());
  const std::size_t s = g.stride(1);
  const double h = g.h(1);
  for (std::size_t p = 0; p < f.size(); ++p) {
    const int iz = g.indices(p)[1];
    if (iz == 0) {
      out[p] = Matrix::Zero(f[p].rows(), f[p].cols());
    } else {
      out[p] = out[p - s] + 0.5 * h * (f[p] + f[p - s]);
    }
  }
  return out;
}

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

const GaussRule& gauss_rule(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> rules;
  std::lock_guard lock(mutex);
  auto it = rules.find(n);
  if (it != rules.end()) return it->second;
  GaussRule r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[static_cast<std::size_t>(i)] = x;
    r.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rules.emplace(n, std::move(r)).first->second;
}

Complex scalar_value(const Monomial& m, const Point& p, Complex lambda) {
  Complex v(m.coeff.re().to_double(), m.coeff.im().to_double());
  for (int a = 0; a < 3; ++a) {
    for (int k = 0; k < m.coords[a]; ++k) v *= p[a];
  }
  for (int k = 0; k < m.coords[CoordMonomial::kLambda]; ++k) v *= lambda;
  return v;
}

const Matrix& constant_value(const NumericSolution& sol, const std::string& name) {
  auto it = sol.constants.find(name);
  if (it == sol.constants.end()) throw std::invalid_argument("unbound constant '" + name + "'");
  return it->second;
}

Matrix atom_at(const JetAtom& a, const NumericSolution& sol, const Point& p) {
  if (a.head == Head::Constant) return constant_value(sol, a.name);
  if (!sol.closed_form) {
    throw std::invalid_argument("analytic evaluation needs a closed-form solution");
  }
  switch (a.head) {
    case Head::X: return sol.closed_form->x(a.d, p);
    case Head::J: return sol.closed_form->j(a.d, p);
    case Head::Jinv: return sol.closed_form->jinv(p);
    case Head::Constant: break;
  }
  return {};
}

// Finite-difference evaluation with per-call jet cache.
class FdEvaluator {
 public:
  FdEvaluator(const NumericSolution& sol, Complex lambda) : sol_(sol), lambda_(lambda) {}

  Field eval(const Expr& e) {
    const Grid& g = sol_.grid;
    const int n = sol_.dimension;
    Field out(g.size(), Matrix::Zero(n, n));
    for (const auto& m : e.terms()) {
      Field prod(g.size(), Matrix::Identity(n, n));
      for (const auto& f : m.factors) {
        const Field& v = factor(f);
        for (std::size_t p = 0; p < g.size(); ++p) prod[p] = prod[p] * v[p];
      }
      for (std::size_t p = 0; p < g.size(); ++p) {
        out[p] += scalar_value(m, g.point(p), lambda_) * prod[p];
      }
    }
    return out;
  }

 private:
  const Field& factor(const Factor& f) {
    if (f.is_integral()) {
      auto it = wrappers_.find(f.inner_ptr().get());
      if (it != wrappers_.end()) return it->second;
      Field v = cumulative_trapezoid_z(eval(f.inner()), sol_.grid);
      return wrappers_.emplace(f.inner_ptr().get(), std::move(v)).first->second;
    }
    return jet(f.atom());
  }

  const Field& jet(const JetAtom& a) {
    auto it = jets_.find(a);
    if (it != jets_.end()) return it->second;
    Field v;
    if (a.head == Head::Constant) {
      v.assign(sol_.grid.size(), constant_value(sol_, a.name));
    } else if (a.head == Head::Jinv) {
      const Field& j = jet(JetAtom::j());
      v.resize(j.size());
      for (std::size_t p = 0; p < j.size(); ++p) v[p] = j[p].inverse();
    } else if (a.is_underived()) {
      const auto& src = a.head == Head::X ? sol_.x : sol_.j;
      if (!src) {
        throw std::invalid_argument(std::string("solution has no ") +
                                    (a.head == Head::X ? "X" : "J") + " field");
      }
      v = *src;
    } else {
      // peel one or two derivatives off the last nonzero axis so lower jets
      // are shared; repeated axes get a genuine second-derivative stencil
      int axis = a.d[2] > 0 ? 2 : a.d[1] > 0 ? 1 : 0;
      int order = std::min(a.d[static_cast<std::size_t>(axis)], 2);
      JetAtom lower = a;
      lower.d[static_cast<std::size_t>(axis)] -= order;
      v = fd_derivative(jet(lower), sol_.grid, axis, order);
    }
    return jets_.emplace(a, std::move(v)).first->second;
  }

  const NumericSolution& sol_;
  Complex lambda_;
  std::map<JetAtom, Field> jets_;
  std::map<const Expr*, Field> wrappers_;
};

}  // namespace

namespace {

// Pointwise analytic evaluation; jets and wrapper values are shared across
// the monomials of one point.
class PointEvaluator {
 public:
  PointEvaluator(const NumericSolution& sol, const Point& p, const EvalOptions& opt)
      : sol_(sol), p_(p), opt_(opt) {}

  Matrix eval(const Expr& e) {
    const int n = sol_.dimension;
    Matrix out = Matrix::Zero(n, n);
    for (const auto& m : e.terms()) {
      Matrix prod = Matrix::Identity(n, n);
      for (const auto& f : m.factors) {
        prod = prod * (f.is_atom() ? atom(f.atom()) : wrapper(f.inner()));
      }
      out += scalar_value(m, p_, opt_.lambda) * prod;
    }
    return out;
  }

 private:
  const Matrix& atom(const JetAtom& a) {
    auto it = atoms_.find(a);
    if (it != atoms_.end()) return it->second;
    return atoms_.emplace(a, atom_at(a, sol_, p_)).first->second;
  }

  const Matrix& wrapper(const Expr& inner) {
    auto it = wrappers_.find(inner);
    if (it != wrappers_.end()) return it->second;
    const int n = sol_.dimension;
    const double z0 = sol_.grid.lo(1);
    Matrix acc = Matrix::Zero(n, n);
    if (p_.z != z0) {
      const GaussRule& rule = gauss_rule(opt_.gauss_nodes);
      const double half = 0.5 * (p_.z - z0);
      const double mid = 0.5 * (p_.z + z0);
      for (std::size_t k = 0; k < rule.x.size(); ++k) {
        Point q = p_;
        q.z = mid + half * rule.x[k];
        acc += (rule.w[k] * half) * PointEvaluator(sol_, q, opt_).eval(inner);
      }
    }
    return wrappers_.emplace(inner, std::move(acc)).first->second;
  }

  const NumericSolution& sol_;
  Point p_;
  const EvalOptions& opt_;
  std::map<JetAtom, Matrix> atoms_;
  std::map<Expr, Matrix> wrappers_;
};

}  // namespace

Matrix eval_at(const Expr& e, const NumericSolution& sol, const Point& p, const EvalOptions& opt) {
  return PointEvaluator(sol, p, opt).eval(e);
}

NumericField eval_expr(const Expr& e, const NumericSolution& sol, const EvalOptions& opt) {
  NumericField out{e.to_string(), {}};
  if (opt.mode == EvalMode::finite_difference) {
    out.values = FdEvaluator(sol, opt.lambda).eval(e);
    return out;
  }
  out.values.resize(sol.grid.size());
  for (std::size_t p = 0; p < sol.grid.size(); ++p) {
    out.values[p] = eval_at(e, sol, sol.grid.point(p), opt);
  }
  return out;
}

double max_norm(const Field& f, const Grid& g, int margin) {
  double best = 0;
  for (std::size_t p = 0; p < f.size(); ++p) {
    auto i = g.indices(p);
    bool inside = true;
    for (int a = 0; a < 3; ++a) {
      int k = i[static_cast<std::size_t>(a)];
      if (k < margin || k >= g.n(a) - margin) inside = false;
    }
    if (!inside) continue;
    double v = f[p].norm();
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    best = std::max(best, v);
  }
  return best;
}

Field subtract_first_plane(const Field& f, const Grid& g) {
  Field out(f.size());
  const std::size_t s = g.stride(1);
  for (std::size_t p = 0; p < f.size(); ++p) {
    const int iz = g.indices(p)[1];
    out[p] = f[p] - f[p - static_cast<std::size_t>(iz) * s];
  }
  return out;
}

EvalMode default_mode(const NumericSolution& sol) {
  return sol.closed_form ? EvalMode::analytic : EvalMode::finite_difference;
}

int default_margin(EvalMode) { return 0; }

}  // namespace sdym::numeric
