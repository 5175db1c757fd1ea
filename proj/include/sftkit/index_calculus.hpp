#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "sftkit/algebra.hpp"
#include "sftkit/rational.hpp"
#include "sftkit/signature.hpp"

namespace sft {

/// Sparse orbit multiset I: orbit index -> multiplicity.
using OrbitMultiset = std::map<std::uint32_t, std::uint32_t>;

enum class PunctureRole : std::uint8_t { Positive, Negative };

/// Discrete type of a moduli space M^A_{g,m}(γ^{I-}; γ^{I+}) with one extra puncture at γ.
struct PunctureProfile {
  OrbitMultiset iMinus;
  OrbitMultiset iPlus;
  std::uint32_t genus = 0;
  std::uint32_t markedPoints = 0;
  GroupElement group;
  std::uint32_t extraOrbit = 0;
  PunctureRole extraRole = PunctureRole::Positive;

  auto operator<=>(const PunctureProfile&) const = default;
};

/// generator degree, see AlgebraSignature::degree.
int generator_degree(const AlgebraSignature& sig, Var v);

/// C(I) = |I|! · Π i_k! · Π κ_k^{i_k}, with |I| the number of nonzero entries.
Rational combinatorial_factor(const AlgebraSignature& sig, const OrbitMultiset& multiset);

/// Total puncture count Σ_k i_k.
std::uint32_t puncture_count(const OrbitMultiset& multiset) noexcept;

/// Virtual dimension of the moduli space; |I^±| counts punctures with multiplicity.
long moduli_dimension(const AlgebraSignature& sig, const PunctureProfile& profile);

/// Dimension left after pairing the m marked points with forms Θ^{a_1..a_m}:
/// moduli_dimension - Σ deg Θ^{a_j}. Requires forms.size() == markedPoints.
long cut_down_dimension(const AlgebraSignature& sig, const PunctureProfile& profile,
                        const std::vector<std::uint32_t>& forms);

/// The generator the profile contributes to: q_γ for a positive extra puncture, p_γ otherwise.
Var profile_generator(const PunctureProfile& profile) noexcept;

/// Degree of e^A q^{I-} p^{I+} hbar^g t_{a_1}...t_{a_m}, computed formally from exponents.
long profile_term_degree(const AlgebraSignature& sig, const PunctureProfile& profile,
                         const std::vector<std::uint32_t>& forms);

/// All profiles with m = 0 and moduli_dimension = 0 within the bounds:
///  - |I-| + |I+| + g <= maxWordLength (if set), |I+| <= maxPWeight (0 when unset),
///    g <= maxHbarWeight (0 when unset), |A|_inf <= maxGroupNorm (0 when unset);
///  - when maxAction is set: the Stokes filter (positive: Σ_{I-} T < T(γ) + Σ_{I+} T,
///    negative: T(γ) + Σ_{I-} T < Σ_{I+} T) and the monomial action <= maxAction.
/// Throws UnboundedError if neither a word-length nor an action bound is present.
std::vector<PunctureProfile> enumerate_admissible_profiles(const AlgebraSignature& sig, std::uint32_t orbit,
                                                           PunctureRole role, const TruncationPolicy& bounds);

/// True iff every term of image has degree |generator| - 1. Zero images pass.
bool degree_drop_check(const AlgebraSignature& sig, const Element& image, Var generator);

}  // namespace sft
