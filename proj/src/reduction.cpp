#include <stdexcept>

#include "sdym/calculus.hpp"

namespace sdym {

namespace {

constexpr int kY = 0;
constexpr int kZ = 1;
constexpr int kYb = 2;

// Right-hand sides of the solved forms for the (1,0,1) jet.
Expr psdym3_rule() {
  return -Expr::x({0, 2, 0}) - commutator(Expr::x({0, 1, 0}), Expr::x({0, 0, 1}));
}

Expr sdym3_rule() {
  Expr jinv = Expr::jinv();
  return Expr::j({0, 0, 1}) * jinv * Expr::j({1, 0, 0}) +
         Expr::j({0, 1, 0}) * jinv * Expr::j({0, 1, 0}) - Expr::j({0, 2, 0});
}

bool mixed_y_ybar(const MultiIndex& d) { return d[kY] >= 1 && d[kYb] >= 1; }

// Directions along which a leading jet may be reached from another leading
// jet (or from the base rule when the predecessor is the base jet itself).
struct Step {
  MultiIndex from;
  Coordinate dir;
};

std::vector<Step> predecessors(const EquationSystem& sys, const JetAtom& a) {
  std::vector<Step> steps;
  const MultiIndex& d = a.d;
  auto add = [&](Coordinate c) {
    MultiIndex p = bumped(d, c, -1);
    if (p[index_of(c)] < 0) return;
    JetAtom pa = a;
    pa.d = p;
    if (sys.is_leading(pa)) steps.push_back({p, c});
  };
  add(Coordinate::y);
  add(Coordinate::z);
  add(Coordinate::ybar);
  return steps;
}

// Base replacements, i.e. leading jets that no other leading jet prolongs to.
std::optional<Expr> base_rule(const EquationSystem& sys, const JetAtom& a) {
  using K = EquationSystem::Kind;
  if (sys.kind() == K::psdym3 || (sys.kind() == K::coupled && a.head == Head::X)) {
    if (a.d == MultiIndex{1, 0, 1}) return psdym3_rule();
  }
  if (sys.kind() == K::sdym3 && a.d == MultiIndex{1, 0, 1}) return sdym3_rule();
  if (sys.kind() == K::coupled && a.head == Head::J) {
    if (a.d == MultiIndex{1, 0, 0}) return Expr::j() * Expr::x({0, 1, 0});
    if (a.d == MultiIndex{0, 1, 0}) return -(Expr::j() * Expr::x({0, 0, 1}));
  }
  return std::nullopt;
}

}  // namespace

const EquationSystem& EquationSystem::psdym3() {
  static const EquationSystem sys(Kind::psdym3);
  return sys;
}

const EquationSystem& EquationSystem::sdym3() {
  static const EquationSystem sys(Kind::sdym3);
  return sys;
}

const EquationSystem& EquationSystem::coupled() {
  static const EquationSystem sys(Kind::coupled);
  return sys;
}

const EquationSystem& EquationSystem::by_name(std::string_view name) {
  if (name == "PSDYM3") return psdym3();
  if (name == "SDYM3") return sdym3();
  if (name == "COUPLED") return coupled();
  throw std::invalid_argument("unknown equation system '" + std::string(name) + "'");
}

std::string_view EquationSystem::name() const {
  switch (kind_) {
    case Kind::psdym3: return "PSDYM3";
    case Kind::sdym3: return "SDYM3";
    case Kind::coupled: return "COUPLED";
  }
  return "?";
}

bool EquationSystem::is_leading(const JetAtom& a) const {
  switch (kind_) {
    case Kind::psdym3: return a.head == Head::X && mixed_y_ybar(a.d);
    case Kind::sdym3: return a.head == Head::J && mixed_y_ybar(a.d);
    case Kind::coupled:
      if (a.head == Head::X) return mixed_y_ybar(a.d);
      return a.head == Head::J && (a.d[kY] >= 1 || a.d[kZ] >= 1);
  }
  return false;
}

Expr EquationSystem::reduced_jet(const JetAtom& a) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(a); it != cache_.end()) return it->second;
  }
  Expr r;
  if (auto base = base_rule(*this, a)) {
    r = reduce_mod(*base, *this);
  } else {
    auto steps = predecessors(*this, a);
    if (steps.empty()) throw std::logic_error("leading jet without predecessor");
    // Deterministic path: prefer prolonging along z, then y, then ybar; for
    // coupled J jets ybar derivatives are taken last so J_{a,b,c} is
    // D_yb^c of J_{a,b,0}.
    const Step* pick = &steps.front();
    for (const auto& s : steps) {
      if (s.dir == Coordinate::ybar) {
        pick = &s;
        break;
      }
    }
    JetAtom prev = a;
    prev.d = pick->from;
    r = reduce_mod(total_derivative(reduced_jet(prev), pick->dir), *this);
  }
  std::lock_guard lock(mutex_);
  cache_.emplace(a, r);
  return r;
}

Expr EquationSystem::reduced_jet(const JetAtom& a, std::mt19937_64& rng) const {
  if (auto base = base_rule(*this, a)) return reduce_mod(*base, *this, rng);
  auto steps = predecessors(*this, a);
  if (steps.empty()) throw std::logic_error("leading jet without predecessor");
  std::uniform_int_distribution<std::size_t> pick(0, steps.size() - 1);
  const Step& s = steps[pick(rng)];
  JetAtom prev = a;
  prev.d = s.from;
  return reduce_mod(total_derivative(reduced_jet(prev, rng), s.dir), *this, rng);
}

namespace {

template <typename JetImage>
Expr reduce_with(const Expr& e, const EquationSystem& sys, JetImage jet_image) {
  return map_factors(e, [&](const Factor& f) -> std::optional<Expr> {
    if (f.is_integral()) {
      Expr inner = reduce_with(f.inner(), sys, jet_image);
      if (inner == f.inner()) return std::nullopt;
      return formal_z_integral(inner);
    }
    if (!sys.is_leading(f.atom())) return std::nullopt;
    return jet_image(f.atom());
  });
}

}  // namespace

Expr reduce_mod(const Expr& e, const EquationSystem& sys) {
  return reduce_with(e, sys, [&](const JetAtom& a) { return sys.reduced_jet(a); });
}

Expr reduce_mod(const Expr& e, const EquationSystem& sys, std::mt19937_64& rng) {
  return reduce_with(e, sys, [&](const JetAtom& a) { return sys.reduced_jet(a, rng); });
}

}  // namespace sdym
