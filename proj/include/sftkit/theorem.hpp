#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sftkit/algebra.hpp"
#include "sftkit/differential.hpp"

namespace sft {

/// Witness that the unit is exact: apply_d(spec, element) = 1, exactly when verifiedToWeight
/// is 0, otherwise modulo monomials of filtration weight > verifiedToWeight.
struct PrimitiveCertificate {
  Flavor flavor = Flavor::CH;
  Element element;
  std::uint32_t verifiedToWeight = 0;
  DifferentialSpec spec;
};

/// Re-runs the check a certificate claims. Returns the residual (zero when it holds).
Element certificate_residual(const PrimitiveCertificate& cert);

/// Finite slice of the algebra searched for a primitive.
struct SearchBounds {
  /// Variables allowed in basis words; empty means every variable of the flavor.
  std::vector<Var> generatorSubset;
  std::uint32_t maxWordLength = 4;
  std::optional<Rational> maxAction;
  /// Basis monomials carry e^A with |A|_inf <= maxGroupNorm.
  std::uint32_t maxGroupNorm = 0;
  /// Power-series flavors solve d a = 1 modulo filtration weight > weight.
  std::uint32_t weight = 5;
};

/// Σ_{k=0}^{K} g^k truncated by the policy, K its filtration bound. Every term of g must have
/// filtration weight >= 1 (IllDefinedSeriesError otherwise).
Element formal_inverse(const AlgebraSignature& sig, const Element& g, const TruncationPolicy& policy);

/// Filtration bound K used by formal_inverse: maxFiltrationWeight, or the sum of the
/// component bounds the flavor filters by. Throws UnboundedError when neither is available.
std::uint32_t filtration_bound(const TruncationPolicy& policy, Flavor f);

/// Whether a primitive in `source` embeds into `target` (CH→rSFT, CH→SFT, X→X*, CH→X*).
bool lift_defined(Flavor source, Flavor target) noexcept;

/// f = f0·(1 - g)^{-1} with g = 1 - d_target(f0), verified to the policy's filtration bound.
PrimitiveCertificate lift_primitive(const PrimitiveCertificate& f0, Flavor target, const DifferentialSpec& targetSpec,
                                    const TruncationPolicy& policy);

/// π(f) as a primitive of targetSpec; the pair must pass verify_chain_map.
PrimitiveCertificate project_primitive(const PrimitiveCertificate& f, Flavor target, const DifferentialSpec& targetSpec);

struct PrimitiveSearch {
  std::optional<PrimitiveCertificate> certificate;
  std::size_t basisSize = 0;
  std::size_t rowCount = 0;
  /// Why nothing was found ("empty degree-1 basis", "unit outside the image", ...).
  std::string reason;
};

/// Solves d a = 1 over the degree-1 monomials within bounds by exact elimination. A miss is a
/// semidecision: nothing within bounds, not a proof that the homology is nonzero.
PrimitiveSearch find_unit_primitive(const DifferentialSpec& spec, const SearchBounds& bounds);

inline constexpr const char* kSemidecisionCaveat =
    "semidecision: no primitive of the unit exists within the searched bounds; this does not prove "
    "that the homology is nonzero";

enum class Verdict : std::uint8_t { Vanishes, NoneWithinBounds };

struct ClassificationReport {
  Verdict verdict = Verdict::NoneWithinBounds;
  /// Flavor in which the first primitive was found.
  std::optional<Flavor> foundIn;
  std::map<Flavor, PrimitiveCertificate> certificates;
  std::vector<Flavor> searched;
  std::vector<Flavor> synthesized;
  std::vector<std::string> notes;
};

/// Completes a partial family: missing flavors come from restricting a supplied richer spec or
/// from embedding a supplied poorer one with zero p-images. Throws SemanticError when the
/// supplied specs disagree under restrict_spec or live on different signatures.
std::map<Flavor, DifferentialSpec> complete_family(const std::map<Flavor, DifferentialSpec>& specs,
                                                   std::vector<Flavor>* synthesized = nullptr);

/// Searches CH first, then the other supplied flavors; on success derives certificates for all
/// six flavors through projections and lifts.
ClassificationReport classify(const std::map<Flavor, DifferentialSpec>& specs, const SearchBounds& bounds,
                              const TruncationPolicy& policy);

}  // namespace sft
