#pragma once

#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sdym/calculus.hpp"
#include "sdym/expr.hpp"

namespace sdym {

/// R Phi = Int_z(A_y Phi) with reduction before and after A_y.
///
/// All operators reduce in the coupled system (PSDYM3 plus the Baecklund
/// relations), which agrees with PSDYM3 on pure-X input and turns J-form
/// connections into X-form ones.
Characteristic recursion_R(const Characteristic& phi);
/// T Q = J R(Jinv Q).
Characteristic recursion_T(const Characteristic& q);
Characteristic lift_by_J(const Characteristic& phi);

enum class OperatorTag { R, T };

struct Hierarchy {
  Characteristic seed;
  std::vector<Characteristic> items;
  std::vector<TraceStatus> trace;  // of items (X side) or of Jinv*items (J side)
  OperatorTag op = OperatorTag::R;
};

/// items[n] = op^n seed with op = R for X seeds and T for J seeds.
Hierarchy hierarchy(const Characteristic& seed, int n_max,
                    const std::set<std::string>& traceless = {});

/// (D_ybar A_y + D_z A_z) Phi reduced mod G[X].
Expr symmetry_residual_psdym3(const Characteristic& phi);
/// (D_ybar A_y + D_z A_z)(Jinv Q) with J-form connections, reduced mod F[J]
/// (coupled system when Q also involves X or Int_z).
Expr symmetry_residual_sdym3(const Characteristic& q);

/// Phi = I{Q} = R(Jinv Q).
Characteristic iso_map_I(const Characteristic& q);

/// [Delta_i, Delta_j] applied to X or J: Delta_i(expr_j) - Delta_j(expr_i).
/// For J targets whose expressions involve X, the X-perturbation is taken as
/// Phi = I{Q}.
Characteristic lie_bracket(const Characteristic& i, const Characteristic& j);

enum class Verdict { pass, fail, inconclusive };
std::string_view to_string(Verdict v);

struct VerificationReport {
  std::string name;
  Verdict status = Verdict::inconclusive;
  /// Symbolic residual after reduction.
  Expr residual;
  /// Numeric residual norm when the numeric fallback ran.
  std::optional<double> numeric_residual;
  /// "symbolic", "symbolic modulo z-independent terms", "numeric" or "n/a".
  std::string method;
  std::string details;
};

/// How residuals are decided.
struct CheckPolicy {
  /// Accept residuals whose z-derivative reduces to zero. These arise only from
  /// the discarded integration constants of Int_z.
  bool modulo_z_kernel = false;
  double tolerance = 1e-8;
  /// Numeric fallback grid (points per axis, [-1, 1]^3).
  int grid_points = 6;
};

/// Decides residual == 0: symbolic, then modulo kernel if allowed, then
/// numerically on the abelian and shear families.
VerificationReport verify_zero(std::string name, const Expr& residual, const CheckPolicy& policy);

/// Decides whether psi = R phi is a symmetry for a suitable integration
/// constant. Int_z discards constants, so S(psi) can be nonzero even though the
/// auto-BT pair D_z psi = A_y phi, D_ybar psi = -A_z phi is solvable. With
/// E = D_ybar psi + A_z phi, which is z-independent when phi is a symmetry,
/// the corrected characteristic psi - Int_ybar(E) has residual S(psi) - A_y E.
/// That is checked numerically with E taken on the first z-plane. Requires phi
/// itself to pass the symbolic symmetry check; otherwise inconclusive.
VerificationReport check_recursion_step(const Characteristic& phi, const Characteristic& psi,
                                        const CheckPolicy& policy);

/// Delta(R probe) - R(Delta probe) - Int_z([Phi_z, probe]).
VerificationReport check_lemma17(const Characteristic& phi, const Expr& probe);

/// P(I{Q}) = I{S Q}.
VerificationReport check_I_equivalence(OperatorTag p, OperatorTag s, const Characteristic& q);

/// I{[Q_i, Q_j]} = [I{Q_i}, I{Q_j}].
VerificationReport check_homomorphy(const Characteristic& qi, const Characteristic& qj);

enum class AbelianSeed { d_y, scaling };

/// L X for the seed operator.
Expr abelian_seed(AbelianSeed s);
/// L e for the seed operator acting on an expression.
Expr apply_seed_operator(AbelianSeed s, const Expr& e);

/// Checks [Delta_m, Delta_n] X = 0 for m, n <= depth and the theorem's
/// hypotheses on the given probes.
std::vector<VerificationReport> check_abelian(AbelianSeed s, int depth,
                                              const std::vector<Expr>& probes);

/// (A_y D_ybar + A_z D_z) e - (D_ybar A_y + D_z A_z) e + [F[J], e] in J form.
VerificationReport check_identity5(const Expr& e);
/// [A_y, A_z] e + [G[X], e] before reduction, and [A_y, A_z] e mod G[X].
VerificationReport check_zero_curvature(const Expr& e);

struct LaxSymbolic {
  Expr first;              // D_z(Jinv Psi) - lam A_y(Jinv Psi)
  Expr second;             // D_ybar(Jinv Psi) + lam A_z(Jinv Psi)
  Expr compatibility;      // S(Psi; J)
};

/// Lax residuals with J-form connections, reduced in the coupled system.
LaxSymbolic lax_residual_symbolic(const Expr& psi);

/// R(scaling seed) compared with the printed closed form
/// z X_y - ybar Jinv J_y + y Int_z(X_yy + [Jinv J_y, X_y]).
struct ScalingAudit {
  Characteristic image;
  Expr printed;            // printed form with Jinv J_y written as X_z
  bool matches = false;
  VerificationReport symmetry;
};
ScalingAudit scaling_audit();

/// Random expressions for identity checks.
struct ProbeOptions {
  int depth = 3;
  int max_derivative = 2;
  bool allow_j = false;
  bool allow_integral = false;
  std::vector<std::string> constants{"M", "N"};
};
Expr random_probe(std::mt19937_64& rng, const ProbeOptions& opt);

}  // namespace sdym
