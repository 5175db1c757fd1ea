#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sftkit/differential.hpp"
#include "sftkit/theorem.hpp"

namespace sft {

enum class ExpectedVerdict : std::uint8_t { Vanishes, PersistsWithinBounds };

/// Desk-scale algebraic model with its documented search bounds. These are toys consistent with
/// every structural rule, not geometric computations.
struct CorpusEntry {
  std::string name;
  AlgebraSignature sig;
  std::map<Flavor, DifferentialSpec> specs;
  ExpectedVerdict expected = ExpectedVerdict::PersistsWithinBounds;
  std::string notes;
  SearchBounds bounds;
  TruncationPolicy policy;
};

/// n = 2, one orbit a with CZ = 2 so |q_a| = 1 and ∂q_a = 1, plus even orbits b, c. The SFT*
/// spec is inner, d = hbar^{-1}[H, .]; the others are its restrictions and hbar -> 0 limits.
CorpusEntry toy_overtwisted();

/// n = 2, orbits with CZ = 3, 5, ..., 2k+1 (all generators even), zero differential.
CorpusEntry toy_tight(std::uint32_t orbitCount = 3);

struct LayeredParams {
  Flavor flavor = Flavor::rSFT;
  std::uint32_t closedOrbits = 3;
  std::uint32_t activeOrbits = 2;
  std::uint32_t maxTermsPerImage = 3;
  std::uint32_t maxFactors = 3;
};

/// Random spec whose active generators map into polynomials of closed ones, so d² = 0 holds by
/// construction; CZ indices of active orbits are solved for so every image drops degree by one.
/// SFT flavors instead use d = hbar^{-1}[p_a F, .] with F free of orbit a, which respects every
/// commutator. Deterministic in the seed. The entry holds the spec and all of its restrictions.
CorpusEntry random_layered_spec(std::uint64_t seed, const LayeredParams& params = {});

/// Named entries: "toy_overtwisted", "toy_tight".
std::vector<std::string> corpus_names();
CorpusEntry corpus_entry(const std::string& name);

}  // namespace sft
