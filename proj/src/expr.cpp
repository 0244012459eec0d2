#include "sdym/expr.hpp"

#include <algorithm>
#include <map>

namespace sdym {

std::string_view coordinate_name(Coordinate c) {
  switch (c) {
    case Coordinate::y: return "y";
    case Coordinate::z: return "z";
    case Coordinate::ybar: return "yb";
  }
  return "?";
}

std::strong_ordering operator<=>(const JetAtom& a, const JetAtom& b) {
  if (auto c = a.head <=> b.head; c != 0) return c;
  if (auto c = a.name <=> b.name; c != 0) return c;
  return a.d <=> b.d;
}

std::strong_ordering operator<=>(const Factor& a, const Factor& b) {
  if (a.is_atom() != b.is_atom()) {
    return a.is_atom() ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (a.is_atom()) return a.atom() <=> b.atom();
  if (a.inner_ptr() == b.inner_ptr()) return std::strong_ordering::equal;
  return a.inner() <=> b.inner();
}

std::strong_ordering compare_keys(const Monomial& a, const Monomial& b) {
  if (auto c = a.coords <=> b.coords; c != 0) return c;
  return std::lexicographical_compare_three_way(a.factors.begin(), a.factors.end(),
                                                b.factors.begin(), b.factors.end());
}

namespace {

bool is_plain(const Factor& f, Head h) {
  return f.is_atom() && f.atom().head == h && f.atom().is_underived();
}

bool cancels(const Factor& left, const Factor& right) {
  return (is_plain(left, Head::J) && is_plain(right, Head::Jinv)) ||
         (is_plain(left, Head::Jinv) && is_plain(right, Head::J));
}

std::vector<Factor> cancel_inverses(const std::vector<Factor>& in) {
  std::vector<Factor> out;
  out.reserve(in.size());
  for (const auto& f : in) {
    if (!out.empty() && cancels(out.back(), f)) {
      out.pop_back();
    } else {
      out.push_back(f);
    }
  }
  return out;
}

void append_coords(std::string& s, const CoordMonomial& c, bool& first) {
  static constexpr std::array<std::string_view, 4> names{"y", "z", "yb", "lam"};
  for (int i = 0; i < 4; ++i) {
    if (c[i] == 0) continue;
    if (!first) s += "*";
    first = false;
    s += names[static_cast<std::size_t>(i)];
    if (c[i] != 1) s += "^" + std::to_string(c[i]);
  }
}

std::string factor_string(const Factor& f) {
  if (f.is_integral()) return "Int_z(" + f.inner().to_string() + ")";
  const JetAtom& a = f.atom();
  std::string s;
  switch (a.head) {
    case Head::X: s = "X"; break;
    case Head::J: s = "J"; break;
    case Head::Jinv: s = "Jinv"; break;
    case Head::Constant: s = a.name; break;
  }
  if (!a.is_underived()) {
    s += "_";
    for (Coordinate c : kCoordinates) {
      for (int k = 0; k < a.order(c); ++k) s += coordinate_name(c);
    }
  }
  return s;
}

}  // namespace

Expr::Expr(std::vector<Monomial> terms) {
  for (auto& m : terms) {
    if (m.coeff.is_zero()) continue;
    m.factors = cancel_inverses(m.factors);
    terms_.push_back(std::move(m));
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const Monomial& a, const Monomial& b) { return compare_keys(a, b) < 0; });
  std::vector<Monomial> merged;
  merged.reserve(terms_.size());
  for (auto& m : terms_) {
    if (!merged.empty() && merged.back().same_key(m)) {
      merged.back().coeff += m.coeff;
    } else {
      if (!merged.empty() && merged.back().coeff.is_zero()) merged.pop_back();
      merged.push_back(std::move(m));
    }
  }
  if (!merged.empty() && merged.back().coeff.is_zero()) merged.pop_back();
  terms_ = std::move(merged);
}

Expr Expr::scalar(Coefficient c) {
  return Expr(Monomial{c, {}, {}});
}

Expr Expr::coordinate(Coordinate c) {
  Monomial m{Coefficient(1), {}, {}};
  m.coords[index_of(c)] = 1;
  return Expr(std::move(m));
}

Expr Expr::lambda() {
  Monomial m{Coefficient(1), {}, {}};
  m.coords[CoordMonomial::kLambda] = 1;
  return Expr(std::move(m));
}

Expr Expr::atom(JetAtom a) {
  if (a.head == Head::Jinv && !a.is_underived()) {
    throw std::invalid_argument("derivatives of Jinv are not stored; use total_derivative");
  }
  if (a.head == Head::Constant && !a.is_underived()) return {};
  return Expr(Monomial{Coefficient(1), {}, {Factor(std::move(a))}});
}

Expr Expr::raw_integral(Expr inner) {
  if (inner.is_zero()) return {};
  return Expr(Monomial{Coefficient(1), {},
                       {Factor(IntegralWrapper{std::make_shared<const Expr>(std::move(inner))})}});
}

Expr Expr::operator-() const {
  Expr r = *this;
  for (auto& m : r.terms_) m.coeff = -m.coeff;
  return r;
}

Expr& Expr::operator+=(const Expr& o) {
  std::vector<Monomial> all = terms_;
  all.insert(all.end(), o.terms_.begin(), o.terms_.end());
  *this = Expr(std::move(all));
  return *this;
}

Expr& Expr::operator-=(const Expr& o) { return *this += -o; }

Expr operator*(const Expr& a, const Expr& b) {
  std::vector<Monomial> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) {
      Monomial m{x.coeff * y.coeff, x.coords * y.coords, x.factors};
      m.factors.insert(m.factors.end(), y.factors.begin(), y.factors.end());
      out.push_back(std::move(m));
    }
  }
  return Expr(std::move(out));
}

Expr operator*(Coefficient c, const Expr& e) {
  if (c.is_zero()) return {};
  Expr r = e;
  for (auto& m : r.terms_) m.coeff *= c;
  return r;
}

std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
  const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = compare_keys(a.terms_[i], b.terms_[i]); c != 0) return c;
    if (auto c = a.terms_[i].coeff <=> b.terms_[i].coeff; c != 0) return c;
  }
  return a.terms_.size() <=> b.terms_.size();
}

std::string Expr::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first_term = true;
  for (const auto& m : terms_) {
    Coefficient c = m.coeff;
    bool negative = c.is_real() && c.re() < Rational(0);
    if (negative) c = -c;
    if (first_term) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first_term = false;

    std::string body;
    bool first = true;
    if (!c.is_one()) {
      body += c.to_string();
      first = false;
    }
    append_coords(body, m.coords, first);
    for (const auto& f : m.factors) {
      if (!first) body += "*";
      first = false;
      body += factor_string(f);
    }
    if (first) body = "Id";
    out += body;
  }
  return out;
}

bool Expr::contains_integral() const {
  for (const auto& m : terms_) {
    for (const auto& f : m.factors) {
      if (f.is_integral()) return true;
    }
  }
  return false;
}

bool Expr::contains_head(Head h) const {
  return !none_of_atoms([h](const JetAtom& a) { return a.head == h; });
}

Expr canonicalize(const Expr& e) { return Expr(e.terms()); }

bool equal(const Expr& a, const Expr& b) { return (a - b).is_zero(); }

Expr commutator(const Expr& a, const Expr& b) { return a * b - b * a; }

std::string_view to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::yes: return "yes";
    case TraceStatus::no: return "no";
    case TraceStatus::unknown: return "unknown";
  }
  return "?";
}

}  // namespace sdym
