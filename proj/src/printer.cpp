#include <map>

#include "sdym/calculus.hpp"
#include "sdym/expr.hpp"

namespace sdym {

namespace {

std::string factors_string(const std::vector<Factor>& fs, std::size_t from, std::size_t to);

std::string factor_pretty(const Factor& f) {
  if (f.is_integral()) return "Int_z(" + to_pretty_string(f.inner()) + ")";
  std::vector<Factor> one{f};
  return Expr(Monomial{Coefficient(1), {}, one}).to_string();
}

std::string factors_string(const std::vector<Factor>& fs, std::size_t from, std::size_t to) {
  std::string s;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) s += "*";
    s += factor_pretty(fs[i]);
  }
  return s;
}

// Coefficient and coordinate prefix, e.g. "2*y*", "-", "" ; sets negative.
std::string prefix(Coefficient c, const CoordMonomial& coords, bool& negative) {
  negative = c.is_real() && c.re() < Rational(0);
  if (negative) c = -c;
  std::string s = Expr(Monomial{c, coords, {}}).to_string();
  if (s == "Id") return "";
  return s + "*";
}

struct Piece {
  Coefficient coeff;
  CoordMonomial coords;
  std::string body;
};

}  // namespace

std::string to_pretty_string(const Expr& e) {
  if (e.is_zero()) return "0";
  const auto& ts = e.terms();
  std::vector<bool> used(ts.size(), false);
  std::vector<Piece> pieces;

  // A group of terms with the same z-free coordinates that is the normal-form
  // antiderivative of a wrapper-free expression prints as one Int_z(...).
  if (e.contains_integral()) {
    std::map<CoordMonomial, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      CoordMonomial outer = ts[i].coords;
      outer[index_of(Coordinate::z)] = 0;
      groups[outer].push_back(i);
    }
    for (const auto& [outer, idx] : groups) {
      std::vector<Monomial> part;
      bool has_wrapper = false;
      for (auto i : idx) {
        Monomial m = ts[i];
        for (int k = 0; k < 4; ++k) {
          if (k != index_of(Coordinate::z)) m.coords[k] -= outer[k];
        }
        for (const auto& f : m.factors) has_wrapper = has_wrapper || f.is_integral();
        part.push_back(std::move(m));
      }
      if (!has_wrapper) continue;
      Expr g(std::move(part));
      Expr dz = total_derivative(g, Coordinate::z);
      if (dz.contains_integral() || !(formal_z_integral(dz) == g)) continue;
      for (auto i : idx) used[i] = true;
      pieces.push_back({Coefficient(1), outer, "Int_z(" + to_pretty_string(dz) + ")"});
    }
  }

  // Lone wrappers sharing outer coordinates are merged into one Int_z(...).
  std::map<CoordMonomial, Expr> wrapped;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (used[i]) continue;
    const Monomial& m = ts[i];
    if (m.factors.size() == 1 && m.factors[0].is_integral()) {
      wrapped[m.coords] += m.coeff * m.factors[0].inner();
      used[i] = true;
    }
  }

  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (used[i]) continue;
    const Monomial& m = ts[i];
    bool folded = false;
    for (std::size_t k = 1; k < m.factors.size() && !folded; ++k) {
      std::vector<Factor> swapped(m.factors.begin() + static_cast<std::ptrdiff_t>(k),
                                  m.factors.end());
      swapped.insert(swapped.end(), m.factors.begin(),
                     m.factors.begin() + static_cast<std::ptrdiff_t>(k));
      if (swapped == m.factors) continue;
      for (std::size_t j = i + 1; j < ts.size(); ++j) {
        if (used[j] || ts[j].coords != m.coords || ts[j].factors != swapped) continue;
        if (!(ts[j].coeff == -m.coeff)) continue;
        used[i] = used[j] = true;
        pieces.push_back({m.coeff, m.coords,
                          "[" + factors_string(m.factors, 0, k) + ", " +
                              factors_string(m.factors, k, m.factors.size()) + "]"});
        folded = true;
        break;
      }
    }
    if (!folded) {
      used[i] = true;
      pieces.push_back({m.coeff, m.coords,
                        m.factors.empty() ? std::string("Id")
                                          : factors_string(m.factors, 0, m.factors.size())});
    }
  }
  for (const auto& [coords, inner] : wrapped) {
    if (inner.is_zero()) continue;
    pieces.push_back({Coefficient(1), coords, "Int_z(" + to_pretty_string(inner) + ")"});
  }

  std::string out;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    bool negative = false;
    std::string pre = prefix(pieces[p].coeff, pieces[p].coords, negative);
    std::string body = pieces[p].body;
    if (body == "Id" && !pre.empty()) {
      body = pre.substr(0, pre.size() - 1);
      pre.clear();
    }
    if (p == 0) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    out += pre + body;
  }
  return out.empty() ? "0" : out;
}

}  // namespace sdym
