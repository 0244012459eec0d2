#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sdym/calculus.hpp"
#include "sdym/expr.hpp"

namespace sdym::gen {

struct GenOptions {
  int depth = 3;
  int max_order = 2;
  bool j = false;
  bool integrals = false;
  bool coords = true;
  std::vector<std::string> constants{"M", "N"};
};

inline MultiIndex random_index(std::mt19937_64& rng, int max_order) {
  std::uniform_int_distribution<int> order(0, max_order);
  std::uniform_int_distribution<int> axis(0, 2);
  MultiIndex d{0, 0, 0};
  for (int k = order(rng); k > 0; --k) d[static_cast<std::size_t>(axis(rng))]++;
  return d;
}

/// Random expression over X jets, optional J/Jinv, constants, coordinates,
/// small rational coefficients and optional Int_z.
inline Expr random_expr(std::mt19937_64& rng, const GenOptions& opt) {
  std::uniform_int_distribution<int> pct(0, 99);
  auto atom = [&]() -> Expr {
    int k = pct(rng);
    if (k < 15 && !opt.constants.empty()) {
      return Expr::constant(opt.constants[static_cast<std::size_t>(k) % opt.constants.size()]);
    }
    if (opt.j && k >= 75) return k >= 90 ? Expr::jinv() : Expr::j(random_index(rng, opt.max_order));
    return Expr::x(random_index(rng, opt.max_order));
  };
  std::function<Expr(int)> go = [&](int d) -> Expr {
    if (d <= 0 || pct(rng) < 20) return atom();
    int k = pct(rng);
    if (k < 30) return go(d - 1) + go(d - 1);
    if (k < 55) return go(d - 1) * go(d - 1);
    if (k < 75) return commutator(go(d - 1), go(d - 1));
    if (opt.coords && k < 85) {
      return Expr::coordinate(kCoordinates[static_cast<std::size_t>(pct(rng) % 3)]) * go(d - 1);
    }
    if (opt.integrals && k < 93) return formal_z_integral(go(d - 1));
    return Coefficient(Rational(pct(rng) % 7 - 3, 1 + pct(rng) % 4)) * go(d - 1);
  };
  return go(opt.depth);
}

inline constexpr int kTrials = 60;

}  // namespace sdym::gen
