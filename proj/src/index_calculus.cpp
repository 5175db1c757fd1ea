#include "sftkit/index_calculus.hpp"

#include <algorithm>
#include <functional>

#include "sftkit/errors.hpp"

namespace sft {

namespace {

Rational factorial(std::uint32_t k) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return Rational(f);
}

long pairing(const AlgebraSignature& sig, const GroupElement& a) {
  if (a.coords.size() != sig.h2rank()) throw SemanticError("group element rank differs from h2rank");
  long s = 0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) s += static_cast<long>(sig.c1()[i] * a.coords[i]);
  return s;
}

/// All multisets over `orbits` orbits with total size <= maxSize, in lexicographic order.
void multisets(std::uint32_t orbits, std::uint32_t maxSize, std::vector<OrbitMultiset>& out) {
  OrbitMultiset current;
  std::function<void(std::uint32_t, std::uint32_t)> rec = [&](std::uint32_t orbit, std::uint32_t left) {
    if (orbit == orbits) {
      out.push_back(current);
      return;
    }
    for (std::uint32_t e = 0; e <= left; ++e) {
      if (e > 0) current[orbit] = e;
      rec(orbit + 1, left - e);
    }
    current.erase(orbit);
  };
  rec(0, maxSize);
}

void group_elements(std::size_t rank, std::int64_t bound, std::vector<GroupElement>& out) {
  GroupElement g = GroupElement::zero(rank);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == rank) {
      out.push_back(g);
      return;
    }
    for (std::int64_t v = -bound; v <= bound; ++v) {
      g.coords[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
}

Rational multiset_action(const AlgebraSignature& sig, const OrbitMultiset& ms) {
  Rational a = 0;
  for (const auto& [i, e] : ms) a += *sig.orbit(i).period * static_cast<long>(e);
  return a;
}

}  // namespace

int generator_degree(const AlgebraSignature& sig, Var v) { return sig.degree(v); }

Rational combinatorial_factor(const AlgebraSignature& sig, const OrbitMultiset& multiset) {
  std::uint32_t nonzero = 0;
  Rational c = 1;
  for (const auto& [i, e] : multiset) {
    if (e == 0) continue;
    ++nonzero;
    c *= factorial(e);
    mpz_class kp;
    mpz_ui_pow_ui(kp.get_mpz_t(), sig.orbit(i).kappa, e);
    c *= Rational(kp);
  }
  return c * factorial(nonzero);
}

std::uint32_t puncture_count(const OrbitMultiset& multiset) noexcept {
  std::uint32_t s = 0;
  for (const auto& [i, e] : multiset) s += e;
  return s;
}

long moduli_dimension(const AlgebraSignature& sig, const PunctureProfile& profile) {
  const long n = sig.n();
  const long punctures = static_cast<long>(puncture_count(profile.iMinus) + puncture_count(profile.iPlus));
  const long g = profile.genus;
  const long cz = sig.orbit(profile.extraOrbit).cz;
  long dim = (n - 3) * (2 - 2 * g - punctures - 1) - 1 + 2 * static_cast<long>(profile.markedPoints) +
             2 * pairing(sig, profile.group);
  dim += profile.extraRole == PunctureRole::Positive ? cz : -cz;
  for (const auto& [i, e] : profile.iPlus) dim += static_cast<long>(e) * sig.orbit(i).cz;
  for (const auto& [i, e] : profile.iMinus) dim -= static_cast<long>(e) * sig.orbit(i).cz;
  return dim;
}

long cut_down_dimension(const AlgebraSignature& sig, const PunctureProfile& profile,
                        const std::vector<std::uint32_t>& forms) {
  if (forms.size() != profile.markedPoints) throw SemanticError("one form per marked point");
  long dim = moduli_dimension(sig, profile);
  for (auto j : forms) dim -= static_cast<long>(sig.tforms().at(j).formDegree);
  return dim;
}

Var profile_generator(const PunctureProfile& profile) noexcept {
  return profile.extraRole == PunctureRole::Positive ? Var::q(profile.extraOrbit) : Var::p(profile.extraOrbit);
}

long profile_term_degree(const AlgebraSignature& sig, const PunctureProfile& profile,
                         const std::vector<std::uint32_t>& forms) {
  long d = sig.degree(profile.group) + static_cast<long>(profile.genus) * sig.degree(Var::hbar());
  for (const auto& [i, e] : profile.iMinus) d += static_cast<long>(e) * sig.degree(Var::q(i));
  for (const auto& [i, e] : profile.iPlus) d += static_cast<long>(e) * sig.degree(Var::p(i));
  for (auto j : forms) d += sig.degree(Var::t(j));
  return d;
}

std::vector<PunctureProfile> enumerate_admissible_profiles(const AlgebraSignature& sig, std::uint32_t orbit,
                                                           PunctureRole role, const TruncationPolicy& bounds) {
  if (orbit >= sig.orbits().size()) throw SemanticError("unknown orbit index");
  const bool actionFilter = bounds.maxAction.has_value();
  if (actionFilter && !sig.has_periods()) throw SemanticError("action filter needs periods on every orbit");
  if (!bounds.maxWordLength && !(actionFilter && bounds.maxPWeight))
    throw UnboundedError("enumeration needs maxWordLength, or maxAction together with maxPWeight");

  const std::uint32_t maxGenus = bounds.maxHbarWeight.value_or(0);
  std::uint32_t maxPlus = bounds.maxPWeight.value_or(0);
  if (bounds.maxWordLength) maxPlus = std::min(maxPlus, *bounds.maxWordLength);

  // Without a word-length bound the action filter bounds I- by T(γ) + max action of I+.
  std::uint32_t maxMinus = 0;
  if (bounds.maxWordLength) {
    maxMinus = *bounds.maxWordLength;
  } else {
    Rational minPeriod = *sig.orbit(0).period;
    Rational maxPeriod = minPeriod;
    for (const auto& o : sig.orbits()) {
      minPeriod = std::min(minPeriod, *o.period);
      maxPeriod = std::max(maxPeriod, *o.period);
    }
    Rational cap = *sig.orbit(orbit).period + maxPeriod * static_cast<long>(maxPlus);
    mpz_class q = cap.get_num() * minPeriod.get_den();
    mpz_class d = cap.get_den() * minPeriod.get_num();
    maxMinus = static_cast<std::uint32_t>(mpz_class(q / d).get_ui());
  }

  const auto orbitCount = static_cast<std::uint32_t>(sig.orbits().size());
  std::vector<OrbitMultiset> minusSets;
  std::vector<OrbitMultiset> plusSets;
  multisets(orbitCount, maxMinus, minusSets);
  multisets(orbitCount, maxPlus, plusSets);
  std::vector<GroupElement> groups;
  group_elements(sig.h2rank(), bounds.maxGroupNorm.value_or(0), groups);

  std::vector<PunctureProfile> out;
  for (const auto& minus : minusSets) {
    for (const auto& plus : plusSets) {
      const std::uint32_t length = puncture_count(minus) + puncture_count(plus);
      if (actionFilter) {
        const Rational extra = *sig.orbit(orbit).period;
        const Rational below = multiset_action(sig, minus);
        const Rational above = multiset_action(sig, plus);
        const bool ok = role == PunctureRole::Positive ? below < extra + above : extra + below < above;
        if (!ok || below + above > *bounds.maxAction) continue;
      }
      for (std::uint32_t g = 0; g <= maxGenus; ++g) {
        if (bounds.maxWordLength && length + g > *bounds.maxWordLength) continue;
        for (const auto& a : groups) {
          PunctureProfile profile{minus, plus, g, 0, a, orbit, role};
          if (moduli_dimension(sig, profile) == 0) out.push_back(std::move(profile));
        }
      }
    }
  }
  return out;
}

bool degree_drop_check(const AlgebraSignature& sig, const Element& image, Var generator) {
  const int target = sig.degree(generator) - 1;
  return std::all_of(image.terms().begin(), image.terms().end(),
                     [&](const auto& term) { return degree(sig, term.first) == target; });
}

}  // namespace sft
