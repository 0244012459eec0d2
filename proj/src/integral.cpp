#include <map>

#include "sdym/calculus.hpp"

namespace sdym {

namespace {

bool bumpable(const Factor& f) {
  return f.is_atom() && (f.atom().head == Head::X || f.atom().head == Head::J);
}

bool opaque(const Factor& f) {
  return f.is_integral() || f.atom().head == Head::Jinv;
}

int z_order(const Factor& f) { return f.atom().order(Coordinate::z); }

// c * (z-free coords) * P * Int_z(z^p * core) * S, with P and S the outer
// runs of constant factors.
Expr wrap(const Monomial& t) {
  std::size_t lo = 0;
  std::size_t hi = t.factors.size();
  while (lo < hi && t.factors[lo].is_constant()) ++lo;
  while (hi > lo && t.factors[hi - 1].is_constant()) --hi;

  CoordMonomial inside;
  inside[index_of(Coordinate::z)] = t.coords.of(Coordinate::z);
  CoordMonomial outside = t.coords;
  outside[index_of(Coordinate::z)] = 0;

  Monomial core{Coefficient(1), inside,
                std::vector<Factor>(t.factors.begin() + static_cast<std::ptrdiff_t>(lo),
                                    t.factors.begin() + static_cast<std::ptrdiff_t>(hi))};
  Monomial result{t.coeff, outside,
                  std::vector<Factor>(t.factors.begin(),
                                      t.factors.begin() + static_cast<std::ptrdiff_t>(lo))};
  result.factors.emplace_back(IntegralWrapper{std::make_shared<const Expr>(Expr(std::move(core)))});
  result.factors.insert(result.factors.end(), t.factors.begin() + static_cast<std::ptrdiff_t>(hi),
                        t.factors.end());
  return Expr(std::move(result));
}

using MonoKey = std::pair<CoordMonomial, std::vector<Factor>>;
using Memo = std::map<MonoKey, Expr>;

Expr integrate_unit(const Monomial& t, Memo& memo);

Expr integrate_monomial(const Monomial& t, Memo& memo) {
  return t.coeff * integrate_unit(Monomial{Coefficient(1), t.coords, t.factors}, memo);
}

// t has coefficient 1.
Expr integrate_unit(const Monomial& t, Memo& memo) {
  MonoKey key{t.coords, t.factors};
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  auto done = [&](Expr r) {
    memo.emplace(std::move(key), r);
    return r;
  };

  std::vector<std::size_t> jets;
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    if (opaque(t.factors[i])) return done(wrap(t));
    if (bumpable(t.factors[i])) jets.push_back(i);
  }

  const int zi = index_of(Coordinate::z);
  if (jets.empty()) {
    Monomial r = t;
    r.coords[zi] += 1;
    r.coeff /= Coefficient(r.coords[zi]);
    return done(Expr(std::move(r)));
  }

  int top = 0;
  for (auto i : jets) top = std::max(top, z_order(t.factors[i]));
  if (top == 0) return done(wrap(t));

  std::size_t lead = t.factors.size();
  for (auto i : jets) {
    if (z_order(t.factors[i]) == top) {
      if (lead != t.factors.size()) return done(wrap(t));
      lead = i;
    }
  }
  for (auto i : jets) {
    if (i < lead && z_order(t.factors[i]) == top - 1) return done(wrap(t));
  }

  // t is the leading term of D_z(b); integrate the rest of D_z(b).
  Monomial b = t;
  JetAtom a = b.factors[lead].atom();
  a.d = bumped(a.d, Coordinate::z, -1);
  b.factors[lead] = Factor(a);

  Expr result(b);
  for (auto i : jets) {
    if (i == lead) continue;
    Monomial other = b;
    JetAtom o = other.factors[i].atom();
    o.d = bumped(o.d, Coordinate::z);
    other.factors[i] = Factor(o);
    result -= integrate_unit(other, memo);
  }
  if (b.coords[zi] > 0) {
    Monomial lower = b;
    lower.coeff = Coefficient(b.coords[zi]);
    lower.coords[zi] -= 1;
    result -= integrate_monomial(lower, memo);
  }
  return done(result);
}

}  // namespace

Expr formal_z_integral(const Expr& e) {
  Memo memo;
  std::vector<Monomial> out;
  for (const auto& m : e.terms()) {
    Expr r = integrate_monomial(m, memo);
    out.insert(out.end(), r.terms().begin(), r.terms().end());
  }
  return Expr(std::move(out));
}

}  // namespace sdym
