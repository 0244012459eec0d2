#pragma once

#include <array>
#include <compare>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sdym/rational.hpp"

namespace sdym {

/// The three independent variables, in their fixed total order y < z < ybar.
enum class Coordinate : int { y = 0, z = 1, ybar = 2 };

inline constexpr std::array<Coordinate, 3> kCoordinates{Coordinate::y, Coordinate::z,
                                                        Coordinate::ybar};

/// DSL spelling: "y", "z", "yb".
std::string_view coordinate_name(Coordinate c);

inline constexpr int index_of(Coordinate c) { return static_cast<int>(c); }

/// Derivative counts (n_y, n_z, n_ybar).
using MultiIndex = std::array<int, 3>;

inline MultiIndex bumped(MultiIndex d, Coordinate c, int by = 1) {
  d[index_of(c)] += by;
  return d;
}

/// Heads ordered X < J < Jinv < constants (constants by name).
enum class Head : int { X = 0, J = 1, Jinv = 2, Constant = 3 };

/// A dependent-variable jet or a named constant matrix.
struct JetAtom {
  Head head = Head::X;
  MultiIndex d{0, 0, 0};
  std::string name;  // constants only

  static JetAtom x(MultiIndex d = {0, 0, 0}) { return {Head::X, d, {}}; }
  static JetAtom j(MultiIndex d = {0, 0, 0}) { return {Head::J, d, {}}; }
  static JetAtom jinv() { return {Head::Jinv, {0, 0, 0}, {}}; }
  static JetAtom constant(std::string n) { return {Head::Constant, {0, 0, 0}, std::move(n)}; }

  bool is_constant() const { return head == Head::Constant; }
  bool is_underived() const { return d == MultiIndex{0, 0, 0}; }
  int order(Coordinate c) const { return d[index_of(c)]; }

  friend bool operator==(const JetAtom&, const JetAtom&) = default;
  friend std::strong_ordering operator<=>(const JetAtom& a, const JetAtom& b);
};

class Expr;

/// One application of the formal z-antiderivative to a canonical inner Expr.
struct IntegralWrapper {
  std::shared_ptr<const Expr> inner;
};

/// A single noncommutative factor: a jet atom or a z-antiderivative.
class Factor {
 public:
  Factor(JetAtom a) : v_(std::move(a)) {}
  Factor(IntegralWrapper w) : v_(std::move(w)) {}

  bool is_atom() const { return std::holds_alternative<JetAtom>(v_); }
  bool is_integral() const { return std::holds_alternative<IntegralWrapper>(v_); }
  const JetAtom& atom() const { return std::get<JetAtom>(v_); }
  const Expr& inner() const { return *std::get<IntegralWrapper>(v_).inner; }
  const std::shared_ptr<const Expr>& inner_ptr() const {
    return std::get<IntegralWrapper>(v_).inner;
  }

  bool is_constant() const { return is_atom() && atom().is_constant(); }

  friend bool operator==(const Factor& a, const Factor& b) { return (a <=> b) == 0; }
  friend std::strong_ordering operator<=>(const Factor& a, const Factor& b);

 private:
  std::variant<JetAtom, IntegralWrapper> v_;
};

/// Exponents of y, z, ybar and the spectral parameter lambda.
struct CoordMonomial {
  std::array<int, 4> exp{0, 0, 0, 0};

  static constexpr int kLambda = 3;

  int operator[](int i) const { return exp[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return exp[static_cast<std::size_t>(i)]; }
  int of(Coordinate c) const { return (*this)[index_of(c)]; }
  bool is_one() const { return exp == std::array<int, 4>{0, 0, 0, 0}; }

  friend CoordMonomial operator*(CoordMonomial a, const CoordMonomial& b) {
    for (int i = 0; i < 4; ++i) a[i] += b[i];
    return a;
  }
  friend bool operator==(const CoordMonomial&, const CoordMonomial&) = default;
  friend auto operator<=>(const CoordMonomial&, const CoordMonomial&) = default;
};

/// coeff * coords * F1 * F2 * ... ; an empty factor list is the identity matrix.
struct Monomial {
  Coefficient coeff;
  CoordMonomial coords;
  std::vector<Factor> factors;

  bool same_key(const Monomial& o) const { return coords == o.coords && factors == o.factors; }
};

std::strong_ordering compare_keys(const Monomial& a, const Monomial& b);

/// Canonical sum of monomials.
///
/// Every Expr is kept in normal form: monomials sorted by key, like keys
/// merged, zero coefficients dropped, and adjacent J*Jinv / Jinv*J cancelled.
/// Factor order is never commuted. Values are immutable once built.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::vector<Monomial> terms);
  Expr(Monomial m) : Expr(std::vector<Monomial>{std::move(m)}) {}

  static Expr zero() { return {}; }
  static Expr identity() { return scalar(Coefficient(1)); }
  static Expr scalar(Coefficient c);
  static Expr coordinate(Coordinate c);
  static Expr lambda();
  static Expr atom(JetAtom a);
  static Expr x(MultiIndex d = {0, 0, 0}) { return atom(JetAtom::x(d)); }
  static Expr j(MultiIndex d = {0, 0, 0}) { return atom(JetAtom::j(d)); }
  static Expr jinv() { return atom(JetAtom::jinv()); }
  static Expr constant(std::string name) { return atom(JetAtom::constant(std::move(name))); }
  /// Wraps inner in D_z^{-1} without attempting any integration. The
  /// formal_z_integral entry point is the normal way to build antiderivatives.
  static Expr raw_integral(Expr inner);

  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Expr operator-() const;
  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  friend Expr operator+(Expr a, const Expr& b) { return a += b; }
  friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator*(Coefficient c, const Expr& e);
  friend Expr operator*(const Expr& e, Coefficient c) { return c * e; }

  friend bool operator==(const Expr& a, const Expr& b) { return (a <=> b) == 0; }
  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

  /// Fully expanded canonical text; parse(to_string()) reproduces *this.
  std::string to_string() const;

  /// True when no factor anywhere (including wrapper inners) satisfies pred.
  template <typename Pred>
  bool none_of_atoms(Pred pred) const;

  bool contains_integral() const;
  bool contains_head(Head h) const;

 private:
  std::vector<Monomial> terms_;
};

Expr canonicalize(const Expr& e);
bool equal(const Expr& a, const Expr& b);
Expr commutator(const Expr& a, const Expr& b);

/// Which dependent variable a symmetry characteristic perturbs.
enum class Target { X, J };

struct Characteristic {
  Target target = Target::X;
  Expr expr;

  static Characteristic on_x(Expr e) { return {Target::X, std::move(e)}; }
  static Characteristic on_j(Expr e) { return {Target::J, std::move(e)}; }
};

enum class TraceStatus { yes, no, unknown };
std::string_view to_string(TraceStatus s);

/// Decides tr(e) = 0 by linearity, cyclicity and tracelessness of X and of the
/// listed constants. Never answers "yes" wrongly.
TraceStatus trace_is_zero(const Expr& e, const std::set<std::string>& traceless_symbols);

/// Error raised by parse; carries the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses the expression DSL into a canonical Expr. Int_z(...) is routed
/// through formal_z_integral.
Expr parse(std::string_view text);

/// Human-oriented rendering that folds pairs c*A*B - c*B*A into c*[A, B].
/// Parses back to the same Expr.
std::string to_pretty_string(const Expr& e);

// ---------------------------------------------------------------------------

template <typename Pred>
bool Expr::none_of_atoms(Pred pred) const {
  for (const auto& m : terms_) {
    for (const auto& f : m.factors) {
      if (f.is_atom()) {
        if (pred(f.atom())) return false;
      } else if (!f.inner().none_of_atoms(pred)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace sdym
