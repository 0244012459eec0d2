#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "sdym/expr.hpp"

namespace sdym {

/// Total derivative D_dir with the Leibniz rule across factors.
///
/// Coordinate monomials are differentiated explicitly, jets are prolonged,
/// Jinv is replaced by -Jinv*J_dir*Jinv, and D_dir passes through Int_z for
/// dir != z (re-integrating the differentiated inner) while D_z(Int_z(f)) = f.
Expr total_derivative(const Expr& e, Coordinate dir);

/// Applies D_y^a D_z^b D_ybar^c.
Expr total_derivative(const Expr& e, MultiIndex orders);

/// Formal z-antiderivative with integration constants discarded.
///
/// The map is linear and is decided monomial by monomial. A monomial whose
/// factors are constants and jets of X or J integrates when its highest
/// z-order jet is unique and leftmost among the jets one order below it;
/// integration by parts against explicit powers of z follows. Everything else
/// is wrapped, with z-free coefficients and outer constant factors pulled
/// outside the wrapper. D_z(formal_z_integral(e)) == e holds exactly.
Expr formal_z_integral(const Expr& e);

/// Characteristics for Delta: q perturbs J, phi perturbs X.
struct FrechetContext {
  std::optional<Expr> q;
  std::optional<Expr> phi;

  static FrechetContext along_x(Expr phi) { return {std::nullopt, std::move(phi)}; }
  static FrechetContext along_j(Expr q) { return {std::move(q), std::nullopt}; }
  static FrechetContext along_both(Expr q, Expr phi) { return {std::move(q), std::move(phi)}; }
};

class MissingCharacteristic : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Frechet derivative Delta of e along the characteristics in ctx.
Expr frechet(const Expr& e, const FrechetContext& ctx);

inline Expr frechet(const Expr& e, const Characteristic& c) {
  return frechet(e, c.target == Target::X ? FrechetContext::along_x(c.expr)
                                          : FrechetContext::along_j(c.expr));
}

/// Which variable carries the connection of the covariant derivatives:
/// X-form uses X_z and -X_ybar, J-form uses Jinv*J_y and Jinv*J_z.
enum class Connection { x_form, j_form };

Expr connection_y(Connection c);
Expr connection_z(Connection c);

/// A_y e = D_y e + [A_y, e]
Expr covariant_y(const Expr& e, Connection c = Connection::x_form);
/// A_z e = D_z e + [A_z, e]
Expr covariant_z(const Expr& e, Connection c = Connection::x_form);

/// G[X] = X_yyb + X_zz + [X_z, X_yb].
Expr psdym3_lhs();
/// F[J] = D_yb(Jinv J_y) + D_z(Jinv J_z).
Expr sdym3_lhs();

/// Solved-form rewrite system for an equation ideal.
///
/// PSDYM3 eliminates X jets with n_y >= 1 and n_ybar >= 1 through
/// X_yyb -> -X_zz - [X_z, X_yb]. SDYM3 eliminates the same class of J jets
/// through J_yyb -> J_yb Jinv J_y + J_z Jinv J_z - J_zz. Coupled adds the
/// Baecklund relations J_y = J X_z, J_z = -J X_yb to PSDYM3, so the only J
/// jets left are J and its pure ybar derivatives.
class EquationSystem {
 public:
  enum class Kind { psdym3, sdym3, coupled };

  static const EquationSystem& psdym3();
  static const EquationSystem& sdym3();
  static const EquationSystem& coupled();
  /// "PSDYM3", "SDYM3" or "COUPLED"; throws std::invalid_argument otherwise.
  static const EquationSystem& by_name(std::string_view name);

  Kind kind() const { return kind_; }
  std::string_view name() const;

  /// Whether the atom is eliminated by this system.
  bool is_leading(const JetAtom& a) const;

  /// Fully reduced replacement for a leading atom (memoized).
  Expr reduced_jet(const JetAtom& a) const;

  /// Same, but prolongs along a randomly chosen derivative path and bypasses
  /// the cache; used to test confluence.
  Expr reduced_jet(const JetAtom& a, std::mt19937_64& rng) const;

 private:
  explicit EquationSystem(Kind k) : kind_(k) {}

  Kind kind_;
  mutable std::mutex mutex_;
  mutable std::map<JetAtom, Expr> cache_;
};

/// Rewrites every leading jet (also inside wrappers) until none remains.
Expr reduce_mod(const Expr& e, const EquationSystem& sys);
Expr reduce_mod(const Expr& e, const EquationSystem& sys, std::mt19937_64& rng);

enum class BtDirection { to_j, to_x };

/// Applies J^{-1}J_y = X_z, J^{-1}J_z = -X_ybar.
///
/// to_j replaces X jets with n_z >= 1 or n_ybar >= 1; X jets carrying only
/// y-derivatives are nonlocal in J and left alone. to_x replaces the exact
/// factor pairs Jinv*J_y and Jinv*J_z.
Expr substitute_bt(const Expr& e, BtDirection dir);

/// Applies op to every monomial, replacing each factor by an Expr image and
/// multiplying out. Used by the rewriting passes.
template <typename FactorImage>
Expr map_factors(const Expr& e, FactorImage image);

// ---------------------------------------------------------------------------

template <typename FactorImage>
Expr map_factors(const Expr& e, FactorImage image) {
  std::vector<Monomial> out;
  for (const auto& m : e.terms()) {
    std::vector<Monomial> partial{Monomial{m.coeff, m.coords, {}}};
    for (const auto& f : m.factors) {
      std::optional<Expr> img = image(f);
      if (!img) {
        for (auto& p : partial) p.factors.push_back(f);
        continue;
      }
      std::vector<Monomial> next;
      next.reserve(partial.size() * img->size());
      for (const auto& p : partial) {
        for (const auto& t : img->terms()) {
          Monomial q{p.coeff * t.coeff, p.coords * t.coords, p.factors};
          q.factors.insert(q.factors.end(), t.factors.begin(), t.factors.end());
          next.push_back(std::move(q));
        }
      }
      partial = std::move(next);
      if (partial.empty()) break;
    }
    for (auto& p : partial) out.push_back(std::move(p));
  }
  return Expr(std::move(out));
}

}  // namespace sdym
