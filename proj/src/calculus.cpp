#include "sdym/calculus.hpp"

namespace sdym {

namespace {

// Sum over positions p of prefix * image(p) * suffix, plus the optional
// coefficient term. image returns nullopt for factors annihilated by the
// derivation.
template <typename Image>
void leibniz(const Monomial& m, Image image, std::vector<Monomial>& out) {
  for (std::size_t p = 0; p < m.factors.size(); ++p) {
    std::optional<Expr> img = image(m.factors[p]);
    if (!img) continue;
    for (const auto& t : img->terms()) {
      Monomial q{m.coeff * t.coeff, m.coords * t.coords, {}};
      q.factors.reserve(m.factors.size() + t.factors.size());
      q.factors.insert(q.factors.end(), m.factors.begin(),
                       m.factors.begin() + static_cast<std::ptrdiff_t>(p));
      q.factors.insert(q.factors.end(), t.factors.begin(), t.factors.end());
      q.factors.insert(q.factors.end(), m.factors.begin() + static_cast<std::ptrdiff_t>(p) + 1,
                       m.factors.end());
      out.push_back(std::move(q));
    }
  }
}

}  // namespace

Expr total_derivative(const Expr& e, Coordinate dir) {
  const int k = index_of(dir);
  std::vector<Monomial> out;
  auto image = [&](const Factor& f) -> std::optional<Expr> {
    if (f.is_integral()) {
      if (dir == Coordinate::z) return f.inner();
      return formal_z_integral(total_derivative(f.inner(), dir));
    }
    const JetAtom& a = f.atom();
    switch (a.head) {
      case Head::Constant: return std::nullopt;
      case Head::Jinv: {
        Expr jinv = Expr::jinv();
        return -(jinv * Expr::j(bumped({0, 0, 0}, dir)) * jinv);
      }
      case Head::X:
      case Head::J: {
        JetAtom b = a;
        b.d = bumped(a.d, dir);
        return Expr::atom(b);
      }
    }
    return std::nullopt;
  };
  for (const auto& m : e.terms()) {
    if (m.coords[k] > 0) {
      Monomial c = m;
      c.coeff *= Coefficient(m.coords[k]);
      c.coords[k] -= 1;
      out.push_back(std::move(c));
    }
    leibniz(m, image, out);
  }
  return Expr(std::move(out));
}

Expr total_derivative(const Expr& e, MultiIndex orders) {
  Expr r = e;
  for (Coordinate c : kCoordinates) {
    for (int i = 0; i < orders[index_of(c)] && !r.is_zero(); ++i) r = total_derivative(r, c);
  }
  return r;
}

Expr frechet(const Expr& e, const FrechetContext& ctx) {
  std::map<std::pair<Head, MultiIndex>, Expr> jets;
  auto jet_of = [&](Head h, const MultiIndex& d) -> const Expr& {
    auto key = std::make_pair(h, d);
    auto it = jets.find(key);
    if (it != jets.end()) return it->second;
    const std::optional<Expr>& base = h == Head::X ? ctx.phi : ctx.q;
    if (!base) {
      throw MissingCharacteristic(h == Head::X ? "no characteristic supplied for X"
                                               : "no characteristic supplied for J");
    }
    return jets.emplace(key, total_derivative(*base, d)).first->second;
  };

  std::vector<Monomial> out;
  auto image = [&](const Factor& f) -> std::optional<Expr> {
    if (f.is_integral()) return formal_z_integral(frechet(f.inner(), ctx));
    const JetAtom& a = f.atom();
    switch (a.head) {
      case Head::Constant: return std::nullopt;
      case Head::Jinv: {
        Expr jinv = Expr::jinv();
        return -(jinv * jet_of(Head::J, {0, 0, 0}) * jinv);
      }
      case Head::X:
      case Head::J: return jet_of(a.head, a.d);
    }
    return std::nullopt;
  };
  for (const auto& m : e.terms()) leibniz(m, image, out);
  return Expr(std::move(out));
}

Expr connection_y(Connection c) {
  if (c == Connection::x_form) return Expr::x({0, 1, 0});
  return Expr::jinv() * Expr::j({1, 0, 0});
}

Expr connection_z(Connection c) {
  if (c == Connection::x_form) return -Expr::x({0, 0, 1});
  return Expr::jinv() * Expr::j({0, 1, 0});
}

Expr covariant_y(const Expr& e, Connection c) {
  return total_derivative(e, Coordinate::y) + commutator(connection_y(c), e);
}

Expr covariant_z(const Expr& e, Connection c) {
  return total_derivative(e, Coordinate::z) + commutator(connection_z(c), e);
}

Expr psdym3_lhs() {
  return Expr::x({1, 0, 1}) + Expr::x({0, 2, 0}) +
         commutator(Expr::x({0, 1, 0}), Expr::x({0, 0, 1}));
}

Expr sdym3_lhs() {
  return total_derivative(connection_y(Connection::j_form), Coordinate::ybar) +
         total_derivative(connection_z(Connection::j_form), Coordinate::z);
}

Expr substitute_bt(const Expr& e, BtDirection dir) {
  if (dir == BtDirection::to_j) {
    return map_factors(e, [](const Factor& f) -> std::optional<Expr> {
      if (f.is_integral()) {
        return formal_z_integral(substitute_bt(f.inner(), BtDirection::to_j));
      }
      const JetAtom& a = f.atom();
      if (a.head != Head::X) return std::nullopt;
      if (a.order(Coordinate::z) >= 1) {
        return total_derivative(connection_y(Connection::j_form), bumped(a.d, Coordinate::z, -1));
      }
      if (a.order(Coordinate::ybar) >= 1) {
        return -total_derivative(connection_z(Connection::j_form),
                                 bumped(a.d, Coordinate::ybar, -1));
      }
      return std::nullopt;
    });
  }

  const JetAtom jy = JetAtom::j({1, 0, 0});
  const JetAtom jz = JetAtom::j({0, 1, 0});
  std::vector<Monomial> out;
  for (const auto& m : e.terms()) {
    std::vector<Monomial> partial{Monomial{m.coeff, m.coords, {}}};
    auto append = [&](const Expr& img) {
      std::vector<Monomial> next;
      for (const auto& p : partial) {
        for (const auto& t : img.terms()) {
          Monomial q{p.coeff * t.coeff, p.coords * t.coords, p.factors};
          q.factors.insert(q.factors.end(), t.factors.begin(), t.factors.end());
          next.push_back(std::move(q));
        }
      }
      partial = std::move(next);
    };
    for (std::size_t i = 0; i < m.factors.size(); ++i) {
      const Factor& f = m.factors[i];
      if (f.is_integral()) {
        append(formal_z_integral(substitute_bt(f.inner(), BtDirection::to_x)));
        continue;
      }
      if (f.atom().head == Head::Jinv && i + 1 < m.factors.size() &&
          m.factors[i + 1].is_atom()) {
        const JetAtom& next = m.factors[i + 1].atom();
        if (next == jy) {
          append(Expr::x({0, 1, 0}));
          ++i;
          continue;
        }
        if (next == jz) {
          append(-Expr::x({0, 0, 1}));
          ++i;
          continue;
        }
      }
      for (auto& p : partial) p.factors.push_back(f);
    }
    for (auto& p : partial) out.push_back(std::move(p));
  }
  return Expr(std::move(out));
}

}  // namespace sdym
