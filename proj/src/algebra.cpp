#include "sftkit/algebra.hpp"

#include <algorithm>
#include <numeric>

#include "sftkit/errors.hpp"

namespace sft {

namespace {

const ExponentList& block(const Monomial& m, VarKind kind) {
  switch (kind) {
    case VarKind::Q: return m.q;
    case VarKind::P: return m.p;
    default: return m.t;
  }
}

ExponentList& block(Monomial& m, VarKind kind) {
  switch (kind) {
    case VarKind::Q: return m.q;
    case VarKind::P: return m.p;
    default: return m.t;
  }
}

std::uint32_t total(const ExponentList& list) noexcept {
  std::uint32_t s = 0;
  for (const auto& [i, e] : list) s += e;
  return s;
}

bool odd(const AlgebraSignature& sig, VarKind kind, std::uint32_t index) {
  return sig.is_odd(Var{kind, index});
}

/// Number of odd-variable occurrences in a block, mod 2: the parity of its degree.
int block_parity(const AlgebraSignature& sig, VarKind kind, const ExponentList& list) {
  int s = 0;
  for (const auto& [i, e] : list)
    if (odd(sig, kind, i)) s += static_cast<int>(e);
  return s & 1;
}

/// Product of two sorted blocks of the same kind: merged exponents and the Koszul sign of
/// bringing the concatenation into order. Sign 0 means an odd variable repeats.
int merge_block(const AlgebraSignature& sig, VarKind kind, const ExponentList& a, const ExponentList& b,
                ExponentList& out) {
  out.clear();
  out.reserve(a.size() + b.size());
  // Parity of #pairs (x in a, y in b, y < x) with both odd.
  int inversions = 0;
  int oddRemainingInA = block_parity(sig, kind, a);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      if (odd(sig, kind, a[i].first)) oddRemainingInA ^= (a[i].second & 1);
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      if (odd(sig, kind, b[j].first) && (b[j].second & 1)) inversions ^= oddRemainingInA;
      out.push_back(b[j++]);
    } else {
      if (odd(sig, kind, a[i].first)) return 0;
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return inversions ? -1 : 1;
}

void check_same_flavor(const Element& a, const Element& b) {
  if (a.flavor() != b.flavor())
    throw FlavorError("flavor mismatch: " + std::string(flavor_name(a.flavor())) + " vs " +
                      std::string(flavor_name(b.flavor())));
}

/// c·m1·m2 in a supercommutative flavor, accumulated into out.
void super_monomial_product(const AlgebraSignature& sig, const Monomial& m1, const Monomial& m2,
                            const Rational& c, Element& out) {
  Monomial r;
  int sign = 1;
  // Word m1 = Q1 P1 T1, m2 = Q2 P2 T2. Moving Q2 past P1 T1, then P2 past T1.
  int pq = (block_parity(sig, VarKind::P, m1.p) + block_parity(sig, VarKind::T, m1.t)) &
           block_parity(sig, VarKind::Q, m2.q);
  int tp = block_parity(sig, VarKind::T, m1.t) & block_parity(sig, VarKind::P, m2.p);
  if ((pq ^ tp) & 1) sign = -sign;
  for (VarKind k : {VarKind::Q, VarKind::P, VarKind::T}) {
    int s = merge_block(sig, k, block(m1, k), block(m2, k), block(r, k));
    if (s == 0) return;
    sign *= s;
  }
  r.hbar = m1.hbar + m2.hbar;
  r.group = m1.group + m2.group;
  out.add_term(r, sign > 0 ? c : Rational(-c));
}

/// Intermediate state of moving a p-block rightward through a q-block.
struct WeylState {
  ExponentList q;
  ExponentList p;
  std::uint32_t hbar = 0;
  auto operator<=>(const WeylState&) const = default;
};

/// c·m1·m2 in a Weyl flavor, accumulated into out.
void weyl_monomial_product(const AlgebraSignature& sig, const Monomial& m1, const Monomial& m2,
                           const Rational& c, Element& out) {
  int sign = 1;
  // Q1 P1 T1 Q2 P2 T2 -> Q1 P1 Q2 P2 T1 T2: t-variables supercommute with everything.
  int t1 = block_parity(sig, VarKind::T, m1.t);
  if (t1 & (block_parity(sig, VarKind::Q, m2.q) ^ block_parity(sig, VarKind::P, m2.p))) sign = -sign;

  // P1 · Q2 = Σ coeff · Y · P' · hbar^h: bubble the p's of P1, last first, across the q-block.
  std::map<WeylState, Rational> states;
  states.emplace(WeylState{m2.q, {}, 0}, Rational(1));
  std::vector<std::uint32_t> pWord;
  for (const auto& [i, e] : m1.p)
    for (std::uint32_t k = 0; k < e; ++k) pWord.push_back(i);

  for (auto it = pWord.rbegin(); it != pWord.rend(); ++it) {
    const std::uint32_t x = *it;
    const bool xOdd = odd(sig, VarKind::P, x);
    const Rational kappa(static_cast<long>(sig.orbit(x).kappa));
    std::map<WeylState, Rational> next;
    auto accumulate = [&next](WeylState s, const Rational& v) {
      auto [pos, inserted] = next.emplace(std::move(s), v);
      if (!inserted) pos->second += v;
    };
    for (const auto& [state, coeff] : states) {
      int prefixSign = 1;
      for (std::size_t j = 0; j < state.q.size(); ++j) {
        const auto [y, e] = state.q[j];
        const bool yOdd = odd(sig, VarKind::Q, y);
        const int swapSign = (xOdd && yOdd) ? -1 : 1;
        if (y == x) {
          // p_γ q_γ = s q_γ p_γ - s κ_γ hbar, summed over the e occurrences of q_γ.
          WeylState contracted = state;
          if (e == 1)
            contracted.q.erase(contracted.q.begin() + static_cast<std::ptrdiff_t>(j));
          else
            contracted.q[j].second = e - 1;
          contracted.hbar += 1;
          Rational v = coeff * kappa * static_cast<long>(e) * (-prefixSign * swapSign);
          accumulate(std::move(contracted), v);
        }
        if (swapSign < 0 && (e & 1)) prefixSign = -prefixSign;
      }
      // Uncontracted term: x now sits left of the p's already moved (all >= x).
      WeylState moved = state;
      if (!moved.p.empty() && moved.p.front().first == x) {
        if (xOdd) continue;
        moved.p.front().second += 1;
      } else {
        moved.p.insert(moved.p.begin(), {x, 1});
      }
      accumulate(std::move(moved), prefixSign > 0 ? coeff : Rational(-coeff));
    }
    std::erase_if(next, [](const auto& kv) { return kv.second == 0; });
    states = std::move(next);
  }

  for (const auto& [state, coeff] : states) {
    Monomial r;
    int s = sign;
    int sq = merge_block(sig, VarKind::Q, m1.q, state.q, r.q);
    if (sq == 0) continue;
    int sp = merge_block(sig, VarKind::P, state.p, m2.p, r.p);
    if (sp == 0) continue;
    int st = merge_block(sig, VarKind::T, m1.t, m2.t, r.t);
    if (st == 0) continue;
    s *= sq * sp * st;
    r.hbar = m1.hbar + m2.hbar + state.hbar;
    r.group = m1.group + m2.group;
    Rational v = c * coeff;
    out.add_term(r, s > 0 ? v : Rational(-v));
  }
}

/// Conservative early pruning: only bounds that the product can never lower.
bool may_survive(const Monomial& a, const Monomial& b, Flavor f, const TruncationPolicy& policy) {
  if (policy.maxFiltrationWeight &&
      filtration_weight(a, f) + filtration_weight(b, f) > *policy.maxFiltrationWeight)
    return false;
  if (policy.maxTWeight && a.t_weight() + b.t_weight() > *policy.maxTWeight) return false;
  if (policy.maxHbarWeight && a.hbar + b.hbar > *policy.maxHbarWeight) return false;
  if (!is_weyl(f)) {
    if (policy.maxPWeight && a.p_weight() + b.p_weight() > *policy.maxPWeight) return false;
    if (policy.maxWordLength && a.word_length() + b.word_length() > *policy.maxWordLength) return false;
  }
  return true;
}

Element product(const AlgebraSignature& sig, const Element& a, const Element& b, const TruncationPolicy* policy) {
  check_same_flavor(a, b);
  const Flavor f = a.flavor();
  Element out(f);
  for (const auto& [m1, c1] : a.terms()) {
    for (const auto& [m2, c2] : b.terms()) {
      if (policy && !may_survive(m1, m2, f, *policy)) continue;
      if (is_weyl(f))
        weyl_monomial_product(sig, m1, m2, c1 * c2, out);
      else
        super_monomial_product(sig, m1, m2, c1 * c2, out);
    }
  }
  return policy ? truncate(sig, out, *policy) : out;
}

}  // namespace

std::uint32_t Monomial::exponent(Var v) const {
  if (v.kind == VarKind::Hbar) return hbar;
  for (const auto& [i, e] : block(*this, v.kind))
    if (i == v.index) return e;
  return 0;
}

std::vector<Var> Monomial::word() const {
  std::vector<Var> w;
  for (VarKind k : {VarKind::Q, VarKind::P, VarKind::T})
    for (const auto& [i, e] : block(*this, k))
      for (std::uint32_t r = 0; r < e; ++r) w.push_back(Var{k, i});
  return w;
}

std::uint32_t Monomial::q_weight() const noexcept { return total(q); }
std::uint32_t Monomial::p_weight() const noexcept { return total(p); }
std::uint32_t Monomial::t_weight() const noexcept { return total(t); }
std::uint32_t Monomial::word_length() const noexcept { return total(q) + total(p) + total(t) + hbar; }

bool Monomial::is_unit() const noexcept {
  return q.empty() && p.empty() && t.empty() && hbar == 0 && group.is_zero();
}

bool admits(Flavor f, const Monomial& m) noexcept {
  if (!has_p(f) && !m.p.empty()) return false;
  if (!has_hbar(f) && m.hbar != 0) return false;
  if (!is_starred(f) && !m.t.empty()) return false;
  return true;
}

int degree(const AlgebraSignature& sig, const Monomial& m) {
  int d = sig.degree(m.group) + static_cast<int>(m.hbar) * sig.degree(Var::hbar());
  for (VarKind k : {VarKind::Q, VarKind::P, VarKind::T})
    for (const auto& [i, e] : block(m, k)) d += static_cast<int>(e) * sig.degree(Var{k, i});
  return d;
}

Element Element::monomial(Flavor f, const Monomial& m, const Rational& c) {
  Element e(f);
  e.add_term(m, c);
  return e;
}

Rational Element::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Element::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  if (!admits(flavor_, m)) throw FlavorError("monomial not allowed in flavor " + std::string(flavor_name(flavor_)));
  auto [it, inserted] = terms_.emplace(m, c);
  if (inserted) {
    it->second.canonicalize();
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Element& Element::operator+=(const Element& other) {
  check_same_flavor(*this, other);
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Element& Element::operator-=(const Element& other) {
  check_same_flavor(*this, other);
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Element& Element::operator*=(const Rational& scalar) {
  if (scalar == 0) {
    terms_.clear();
    return *this;
  }
  Rational s = scalar;
  s.canonicalize();
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

Element Element::operator-() const {
  Element r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

bool Element::operator==(const Element& other) const {
  return flavor_ == other.flavor_ && terms_ == other.terms_;
}

Element embed(const Element& e, Flavor target) {
  Element r(target);
  for (const auto& [m, c] : e.terms()) r.add_term(m, c);
  return r;
}

std::optional<int> homogeneous_degree(const AlgebraSignature& sig, const Element& e) {
  std::optional<int> d;
  for (const auto& [m, c] : e.terms()) {
    int dm = degree(sig, m);
    if (d && *d != dm) return std::nullopt;
    d = dm;
  }
  return d;
}

Parity parity(const AlgebraSignature& sig, Var v) { return sig.is_odd(v) ? Parity::Odd : Parity::Even; }

Element variable(const AlgebraSignature& sig, Flavor f, Var v, const Rational& c) {
  const Var word[] = {v};
  return normalize(sig, f, word, c, GroupElement::zero(sig.h2rank()));
}

Element normalize(const AlgebraSignature& sig, Flavor f, std::span<const Var> word, const Rational& c,
                  const GroupElement& group) {
  for (Var v : word) sig.check_var(v);
  if (group.coords.size() != sig.h2rank()) throw SemanticError("group element rank differs from h2rank");
  Element out(f);
  if (is_weyl(f)) {
    Monomial start = Monomial::unit(sig.h2rank());
    start.group = group;
    Element acc = Element::monomial(f, start, c);
    for (Var v : word) {
      Monomial m = Monomial::unit(sig.h2rank());
      if (v.kind == VarKind::Hbar)
        m.hbar = 1;
      else
        block(m, v.kind).emplace_back(v.index, 1);
      acc = mul_weyl(sig, acc, Element::monomial(f, m));
    }
    return acc;
  }
  // Count inversions among odd variables; a stable sort keeps equal variables adjacent.
  int inversions = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i].kind == VarKind::Hbar || !sig.is_odd(word[i])) continue;
    for (std::size_t j = i + 1; j < word.size(); ++j) {
      if (word[j].kind == VarKind::Hbar || !sig.is_odd(word[j])) continue;
      if (word[j] == word[i]) return out;
      if (word[j] < word[i]) ++inversions;
    }
  }
  std::vector<Var> sorted(word.begin(), word.end());
  std::stable_sort(sorted.begin(), sorted.end());
  Monomial m = Monomial::unit(sig.h2rank());
  m.group = group;
  for (Var v : sorted) {
    if (v.kind == VarKind::Hbar) {
      ++m.hbar;
      continue;
    }
    auto& b = block(m, v.kind);
    if (!b.empty() && b.back().first == v.index)
      ++b.back().second;
    else
      b.emplace_back(v.index, 1);
  }
  out.add_term(m, (inversions & 1) ? Rational(-c) : c);
  return out;
}

std::uint32_t filtration_weight(const Monomial& m, Flavor f, FiltrationMode mode) {
  if (mode == FiltrationMode::MarkedOnly) return m.t_weight();
  std::uint32_t w = 0;
  if (has_p(f)) w += m.p_weight();
  if (has_hbar(f)) w += m.hbar;
  if (is_starred(f)) w += m.t_weight();
  return w;
}

Rational monomial_action(const AlgebraSignature& sig, const Monomial& m) {
  Rational a = 0;
  for (const ExponentList* b : {&m.q, &m.p}) {
    for (const auto& [i, e] : *b) {
      const auto& period = sig.orbit(i).period;
      if (!period) throw SemanticError("action bound needs a period for orbit '" + sig.orbit(i).id + "'");
      a += *period * static_cast<long>(e);
    }
  }
  return a;
}

bool within(const AlgebraSignature& sig, const Monomial& m, Flavor f, const TruncationPolicy& policy) {
  if (policy.maxPWeight && m.p_weight() > *policy.maxPWeight) return false;
  if (policy.maxHbarWeight && m.hbar > *policy.maxHbarWeight) return false;
  if (policy.maxTWeight && m.t_weight() > *policy.maxTWeight) return false;
  if (policy.maxWordLength && m.word_length() > *policy.maxWordLength) return false;
  if (policy.maxFiltrationWeight && filtration_weight(m, f) > *policy.maxFiltrationWeight) return false;
  if (policy.maxGroupNorm && m.group.linf_norm() > static_cast<std::int64_t>(*policy.maxGroupNorm)) return false;
  if (policy.maxAction && monomial_action(sig, m) > *policy.maxAction) return false;
  return true;
}

Element truncate(const AlgebraSignature& sig, const Element& e, const TruncationPolicy& policy) {
  Element r(e.flavor());
  for (const auto& [m, c] : e.terms())
    if (within(sig, m, e.flavor(), policy)) r.add_term(m, c);
  return r;
}

Element mul_super(const AlgebraSignature& sig, const Element& a, const Element& b) {
  if (is_weyl(a.flavor())) throw FlavorError("mul_super needs a supercommutative flavor");
  return product(sig, a, b, nullptr);
}

Element mul_weyl(const AlgebraSignature& sig, const Element& a, const Element& b) {
  if (!is_weyl(a.flavor())) throw FlavorError("mul_weyl needs flavor SFT or SFT*");
  return product(sig, a, b, nullptr);
}

Element mul(const AlgebraSignature& sig, const Element& a, const Element& b) { return product(sig, a, b, nullptr); }

Element mul(const AlgebraSignature& sig, const Element& a, const Element& b, const TruncationPolicy& policy) {
  return product(sig, a, b, &policy);
}

}  // namespace sft
