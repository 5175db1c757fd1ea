#include "sftkit/corpus.hpp"

#include <algorithm>
#include <random>

#include "sftkit/errors.hpp"

namespace sft {

namespace {

Element word_element(const AlgebraSignature& sig, Flavor f, std::initializer_list<Var> word, const Rational& c) {
  return normalize(sig, f, std::span<const Var>(word.begin(), word.size()), c, GroupElement::zero(sig.h2rank()));
}

Element one(const AlgebraSignature& sig, Flavor f) { return Element::one(f, sig.h2rank()); }

// hbar -> 0: the rational (or marked rational) spec underlying a Weyl spec.
DifferentialSpec classical_limit(const DifferentialSpec& spec) {
  const Flavor target = spec.flavor == Flavor::SFTStar ? Flavor::rSFTStar : Flavor::rSFT;
  DifferentialSpec out{target, spec.sig, {}};
  for (const auto& [v, image] : spec.images) {
    Element e(target);
    for (const auto& [m, c] : image.terms())
      if (m.hbar == 0) e.add_term(m, c);
    out.images.emplace(v, std::move(e));
  }
  return out;
}

// Deterministic across standard libraries, unlike std::uniform_int_distribution.
class Picker {
 public:
  explicit Picker(std::uint64_t seed) : rng_(seed) {}
  long pick(long lo, long hi) { return lo + static_cast<long>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

 private:
  std::mt19937_64 rng_;
};

// Sorted monomial of a word, or nullopt when an odd variable repeats.
std::optional<Monomial> sorted_monomial(const AlgebraSignature& sig, std::vector<Var> word, GroupElement group) {
  std::sort(word.begin(), word.end());
  Monomial m = Monomial::unit(sig.h2rank());
  m.group = std::move(group);
  for (std::size_t i = 0; i < word.size();) {
    std::size_t j = i;
    while (j < word.size() && word[j] == word[i]) ++j;
    const auto e = static_cast<std::uint32_t>(j - i);
    const Var v = word[i];
    if (e > 1 && sig.is_odd(v)) return std::nullopt;
    switch (v.kind) {
      case VarKind::Q: m.q.emplace_back(v.index, e); break;
      case VarKind::P: m.p.emplace_back(v.index, e); break;
      case VarKind::T: m.t.emplace_back(v.index, e); break;
      case VarKind::Hbar: m.hbar = e; break;
    }
    i = j;
  }
  return m;
}

}  // namespace

CorpusEntry toy_overtwisted() {
  // a: CZ 2 -> |q_a| = 1, |p_a| = -3 ; b: CZ 3 -> |q_b| = 2, |p_b| = -4 ; c: CZ 5 -> |q_c| = 4, |p_c| = -6.
  AlgebraSignature sig(2, {},
                       {{"a", 2, 1, Rational(3)}, {"b", 3, 2, Rational(1)}, {"c", 5, 1, Rational(2)}},
                       {{"theta0", 0}, {"theta2", 2}});
  const Var qb = Var::q(1), qc = Var::q(2);
  const Var pa = Var::p(0), pb = Var::p(1);
  const Var t0 = Var::t(0), h = Var::hbar();

  CorpusEntry entry{"toy_overtwisted", sig, {}, ExpectedVerdict::Vanishes,
                    "SFT* is d = hbar^{-1}[H, .] with H = p_a (1 - q_c p_b + hbar q_b - t q_b), so d q_a = 1 + ...; "
                    "the other flavors are its restrictions and classical limits",
                    SearchBounds{}, TruncationPolicy::filtration(5)};
  entry.bounds.maxWordLength = 4;
  entry.bounds.weight = 5;

  const Flavor f = Flavor::SFTStar;
  const Element g = word_element(sig, f, {h, qb}, 1) - word_element(sig, f, {qc, pb}, 1) - word_element(sig, f, {t0, qb}, 1);
  const Element hamiltonian = mul_weyl(sig, word_element(sig, f, {pa}, 1), one(sig, f) + g);
  const DifferentialSpec full = inner_differential(sig, f, hamiltonian);
  const DifferentialSpec rationalStar = classical_limit(full);
  entry.specs.emplace(Flavor::SFTStar, full);
  entry.specs.emplace(Flavor::SFT, restrict_spec(full, Flavor::SFT));
  entry.specs.emplace(Flavor::CHStar, restrict_spec(full, Flavor::CHStar));
  entry.specs.emplace(Flavor::CH, restrict_spec(full, Flavor::CH));
  entry.specs.emplace(Flavor::rSFT, restrict_spec(rationalStar, Flavor::rSFT));
  entry.specs.emplace(Flavor::rSFTStar, rationalStar);
  return entry;
}

CorpusEntry toy_tight(std::uint32_t orbitCount) {
  if (orbitCount == 0) throw SemanticError("toy_tight needs at least one orbit");
  std::vector<OrbitRecord> orbits;
  for (std::uint32_t i = 0; i < orbitCount; ++i)
    orbits.push_back({"e" + std::to_string(i + 1), static_cast<int>(2 * i + 3), 1, Rational(i + 1)});
  AlgebraSignature sig(2, {}, std::move(orbits));
  CorpusEntry entry{"toy_tight", sig, {}, ExpectedVerdict::PersistsWithinBounds,
                    "all generators even and d = 0: the degree-1 part is empty, so no primitive exists",
                    SearchBounds{}, TruncationPolicy::filtration(5)};
  entry.bounds.maxWordLength = 6;
  for (Flavor f : kAllFlavors) entry.specs.emplace(f, zero_differential(sig, f));
  return entry;
}

CorpusEntry random_layered_spec(std::uint64_t seed, const LayeredParams& params) {
  Picker rng(seed);
  const Flavor f = params.flavor;
  const int n = static_cast<int>(rng.pick(2, 4));
  std::vector<std::int64_t> c1;
  if (rng.pick(0, 1) == 1) c1.push_back(rng.pick(0, 1));

  const std::uint32_t total = params.closedOrbits + params.activeOrbits;
  if (params.closedOrbits == 0 || total == 0) throw SemanticError("layered spec needs closed orbits");
  // Shuffle positions so closed and active orbits interleave in the variable order.
  std::vector<std::uint32_t> position(total);
  for (std::uint32_t i = 0; i < total; ++i) position[i] = i;
  for (std::uint32_t i = total - 1; i > 0; --i) std::swap(position[i], position[rng.pick(0, i)]);

  std::vector<OrbitRecord> orbits(total);
  std::vector<std::uint32_t> closed;
  std::vector<std::uint32_t> active;
  for (std::uint32_t k = 0; k < total; ++k) {
    const std::uint32_t slot = position[k];
    const bool isClosed = k < params.closedOrbits;
    orbits[slot].id = (isClosed ? "c" : "a") + std::to_string(isClosed ? k : k - params.closedOrbits);
    orbits[slot].cz = isClosed ? static_cast<int>(rng.pick(-2, 6)) : 0;
    orbits[slot].kappa = static_cast<std::uint32_t>(rng.pick(1, 3));
    (isClosed ? closed : active).push_back(slot);
  }
  std::vector<TFormRecord> tforms;
  if (is_starred(f))
    for (int j = 0; j < 2; ++j)
      tforms.push_back({"th" + std::to_string(j), static_cast<std::uint32_t>(rng.pick(0, 2 * n - 1))});

  // Closed variables never involve the active CZ values, so a provisional signature suffices.
  const AlgebraSignature draft(n, c1, orbits, tforms);
  std::vector<Var> pool;
  std::vector<Var> pPool;
  for (auto i : closed) {
    pool.push_back(Var::q(i));
    if (has_p(f)) {
      pool.push_back(Var::p(i));
      pPool.push_back(Var::p(i));
    }
  }
  for (std::uint32_t j = 0; j < tforms.size(); ++j) pool.push_back(Var::t(j));
  if (has_hbar(f)) pool.push_back(Var::hbar());

  auto draw = [&](bool needP) -> std::optional<Monomial> {
    std::vector<Var> word;
    const long len = rng.pick(needP ? 1 : 0, params.maxFactors);
    for (long k = 0; k < len; ++k) {
      const auto& from = (needP && k == 0) ? pPool : pool;
      word.push_back(from[rng.pick(0, static_cast<long>(from.size()) - 1)]);
    }
    GroupElement g = GroupElement::zero(c1.size());
    for (auto& x : g.coords) x = rng.pick(-1, 1);
    return sorted_monomial(draft, std::move(word), std::move(g));
  };
  auto coefficient = [&] {
    long num = rng.pick(-4, 3);
    if (num >= 0) ++num;
    Rational r(num, rng.pick(1, 3));
    r.canonicalize();
    return r;
  };

  std::optional<DifferentialSpec> built;
  if (is_weyl(f)) {
    // d = hbar^{-1}[H, .] with H = p_a F, p_a odd and F free of orbit a: then H² = 0, so d is a
    // well-defined derivation with d² = 0. Every other orbit may appear in F.
    if (active.empty()) throw SemanticError("a Weyl layered spec needs an active orbit");
    const std::uint32_t carrier = active.front();
    for (std::size_t k = 1; k < active.size(); ++k) orbits[active[k]].cz = static_cast<int>(rng.pick(-2, 6));
    std::vector<Var> weylPool;
    for (std::uint32_t i = 0; i < total; ++i) {
      if (i == carrier) continue;
      weylPool.push_back(Var::q(i));
      weylPool.push_back(Var::p(i));
    }
    for (std::uint32_t j = 0; j < tforms.size(); ++j) weylPool.push_back(Var::t(j));
    weylPool.push_back(Var::hbar());
    const AlgebraSignature weylDraft(n, c1, orbits, tforms);
    auto drawWeyl = [&]() -> std::optional<Monomial> {
      std::vector<Var> word;
      const long len = rng.pick(1, params.maxFactors);
      for (long k = 0; k < len; ++k) word.push_back(weylPool[rng.pick(0, static_cast<long>(weylPool.size()) - 1)]);
      GroupElement g = GroupElement::zero(c1.size());
      for (auto& x : g.coords) x = rng.pick(-1, 1);
      return sorted_monomial(weylDraft, std::move(word), std::move(g));
    };
    std::vector<std::pair<Monomial, Rational>> terms;
    if (rng.pick(0, 2) == 0) terms.emplace_back(Monomial::unit(c1.size()), coefficient());
    for (int tries = 0; tries < 40 && terms.empty(); ++tries) {
      auto m = drawWeyl();
      if (m && (degree(weylDraft, *m) & 1) == 0) terms.emplace_back(*m, coefficient());
    }
    if (terms.empty()) terms.emplace_back(Monomial::unit(c1.size()), coefficient());
    const int d = degree(weylDraft, terms.front().first);
    for (std::uint32_t extra = 1; extra < params.maxTermsPerImage; ++extra) {
      for (int tries = 0; tries < 40; ++tries) {
        auto m = drawWeyl();
        if (m && degree(weylDraft, *m) == d) {
          terms.emplace_back(*m, coefficient());
          break;
        }
      }
    }
    orbits[carrier].cz = d - n + 4;  // |p_a| = 2n - 7 - d, odd because d is even
    const AlgebraSignature sig(n, c1, orbits, tforms);
    Element fPart(f);
    for (const auto& [m, c] : terms) fPart.add_term(m, c);
    built = inner_differential(sig, f, mul_weyl(sig, variable(sig, f, Var::p(carrier)), fPart));
  } else {
    std::map<Var, std::vector<std::pair<Monomial, Rational>>> raw;
    for (auto i : active) {
      std::optional<Monomial> first;
      while (!first) first = draw(false);
      const int d = degree(draft, *first);
      orbits[i].cz = d + 4 - n;
      auto& qTerms = raw[Var::q(i)];
      qTerms.emplace_back(*first, coefficient());
      for (std::uint32_t extra = 1; extra < params.maxTermsPerImage; ++extra) {
        for (int tries = 0; tries < 40; ++tries) {
          auto m = draw(false);
          if (m && degree(draft, *m) == d) {
            qTerms.emplace_back(*m, coefficient());
            break;
          }
        }
      }
      if (has_p(f) && !pPool.empty()) {
        const int target = -orbits[i].cz + n - 3 - 1;
        auto& pTerms = raw[Var::p(i)];
        for (int tries = 0; tries < 60 && pTerms.size() < params.maxTermsPerImage; ++tries) {
          auto m = draw(true);
          if (m && degree(draft, *m) == target) pTerms.emplace_back(*m, coefficient());
        }
      }
    }

    AlgebraSignature sig(n, c1, orbits, tforms);
    built = zero_differential(sig, f);
    for (const auto& [v, terms] : raw)
      for (const auto& [m, c] : terms) built->images[v].add_term(m, c);
  }
  DifferentialSpec spec = std::move(*built);
  const AlgebraSignature& sig = spec.sig;

  CorpusEntry entry{"layered-" + std::to_string(seed), sig, {}, ExpectedVerdict::PersistsWithinBounds,
                    "random layered spec; expected verdict is the CH search result under these bounds",
                    SearchBounds{}, TruncationPolicy::filtration(2)};
  entry.bounds.maxWordLength = 3;
  entry.bounds.weight = 2;
  for (Flavor target : kAllFlavors)
    if (projection_defined(f, target)) entry.specs.emplace(target, restrict_spec(spec, target));
  entry.specs.emplace(f, std::move(spec));
  if (find_unit_primitive(entry.specs.at(Flavor::CH), entry.bounds).certificate)
    entry.expected = ExpectedVerdict::Vanishes;
  return entry;
}

std::vector<std::string> corpus_names() { return {"toy_overtwisted", "toy_tight"}; }

CorpusEntry corpus_entry(const std::string& name) {
  if (name == "toy_overtwisted") return toy_overtwisted();
  if (name == "toy_tight") return toy_tight();
  throw SemanticError("unknown corpus entry '" + name + "'");
}

}  // namespace sft
