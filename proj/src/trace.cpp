#include <map>

#include "sdym/expr.hpp"

namespace sdym {

namespace {

bool plain(const Factor& f, Head h) {
  return f.is_atom() && f.atom().head == h && f.atom().is_underived();
}

// Jinv ... J and J ... Jinv cancel across the cyclic seam.
std::vector<Factor> cyclic_reduce(std::vector<Factor> w) {
  while (w.size() >= 2) {
    const Factor& a = w.front();
    const Factor& b = w.back();
    bool seam = (plain(a, Head::J) && plain(b, Head::Jinv)) ||
                (plain(a, Head::Jinv) && plain(b, Head::J));
    if (!seam) break;
    w.erase(w.begin());
    w.pop_back();
  }
  return w;
}

std::vector<Factor> minimal_rotation(const std::vector<Factor>& w) {
  std::vector<Factor> best = w;
  for (std::size_t s = 1; s < w.size(); ++s) {
    std::vector<Factor> r(w.begin() + static_cast<std::ptrdiff_t>(s), w.end());
    r.insert(r.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(s));
    if (std::lexicographical_compare(r.begin(), r.end(), best.begin(), best.end())) best = r;
  }
  return best;
}

struct WordKey {
  CoordMonomial coords;
  std::vector<Factor> word;
  friend bool operator<(const WordKey& a, const WordKey& b) {
    if (a.coords != b.coords) return a.coords < b.coords;
    return std::lexicographical_compare(a.word.begin(), a.word.end(), b.word.begin(),
                                        b.word.end());
  }
};

// Returns the index of the only non-constant factor if it is an integral
// wrapper; -1 otherwise.
int lone_wrapper(const std::vector<Factor>& fs) {
  int found = -1;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].is_constant()) continue;
    if (!fs[i].is_integral() || found >= 0) return -1;
    found = static_cast<int>(i);
  }
  return found;
}

bool single_traceless(const std::vector<Factor>& w, const std::set<std::string>& traceless) {
  if (w.size() != 1 || !w[0].is_atom()) return false;
  const JetAtom& a = w[0].atom();
  if (a.head == Head::X) return true;
  return a.head == Head::Constant && traceless.count(a.name) > 0;
}

}  // namespace

TraceStatus trace_is_zero(const Expr& e, const std::set<std::string>& traceless) {
  std::map<WordKey, Coefficient> words;
  std::map<CoordMonomial, Expr> integrals;

  for (const auto& m : e.terms()) {
    int w = lone_wrapper(m.factors);
    if (w >= 0) {
      // tr(P Int(f) S) = Int(tr(f S P)) for constant P, S.
      std::vector<Factor> sp(m.factors.begin() + w + 1, m.factors.end());
      sp.insert(sp.end(), m.factors.begin(), m.factors.begin() + w);
      Expr tail(Monomial{m.coeff, {}, sp});
      integrals[m.coords] += m.factors[static_cast<std::size_t>(w)].inner() * tail;
      continue;
    }
    WordKey key{m.coords, minimal_rotation(cyclic_reduce(m.factors))};
    words[key] += m.coeff;
  }

  bool unknown = false;
  bool identity_nonzero = false;
  for (const auto& [key, c] : words) {
    if (c.is_zero()) continue;
    if (key.word.empty()) {
      identity_nonzero = true;
    } else if (!single_traceless(key.word, traceless)) {
      unknown = true;
    }
  }
  for (const auto& [coords, inner] : integrals) {
    if (trace_is_zero(inner, traceless) != TraceStatus::yes) unknown = true;
  }
  if (unknown) return TraceStatus::unknown;
  return identity_nonzero ? TraceStatus::no : TraceStatus::yes;
}

}  // namespace sdym
