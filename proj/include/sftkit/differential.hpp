#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sftkit/algebra.hpp"
#include "sftkit/signature.hpp"

namespace sft {

/// A differential given by its values on q_γ and (when the flavor has them) p_γ.
/// hbar and t_j are closed. Coefficients are already divided by C(I-)C(I+) and signed.
struct DifferentialSpec {
  Flavor flavor = Flavor::CH;
  AlgebraSignature sig;
  std::map<Var, Element> images;

  /// Image of a q/p generator; throws MissingImageError.
  const Element& image(Var v) const;

  bool operator==(const DifferentialSpec&) const = default;
};

/// A spec for `flavor` on `sig` with every generator mapped to zero.
DifferentialSpec zero_differential(const AlgebraSignature& sig, Flavor flavor);

/// d x = hbar^{-1} [H, x] on every q/p generator, for H of odd degree in a Weyl flavor. Such a d
/// respects every commutator relation; d² = 0 when H² = 0.
DifferentialSpec inner_differential(const AlgebraSignature& sig, Flavor flavor, const Element& h);

/// Graded Leibniz extension: Σ_i (-1)^{|x_1...x_{i-1}|} x_1...x_{i-1} d(x_i) x_{i+1}...x_k.
Element apply_d(const DifferentialSpec& spec, const Element& e);

/// Leibniz rule on an arbitrary (not necessarily normal-ordered) word c·e^A·x_1...x_k.
Element apply_d_word(const DifferentialSpec& spec, std::span<const Var> word, const Rational& c,
                     const GroupElement& group);

struct GeneratorResidual {
  Var generator;
  Element residual;
};

struct DSquaredReport {
  bool pass = true;
  std::vector<GeneratorResidual> failures;
  /// Set when residuals were truncated before judging ("verified to weight W").
  std::optional<std::uint32_t> verifiedToWeight;
};

/// d(d(x)) for every generator with an image; optionally truncated before judging.
DSquaredReport check_d_squared(const DifferentialSpec& spec, const std::optional<TruncationPolicy>& policy = {});

enum class ViolationKind : std::uint8_t {
  FlavorShape,
  DegreeDrop,
  PositivePuncture,
  Action,
  CommutatorCompatibility,
  MissingImage,
};

std::string_view violation_name(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  Var generator;
  std::string detail;
};

struct StructureReport {
  std::vector<Violation> violations;
  /// False when an SFT commutator check failed: the spec is kept as formal, d² unchecked.
  bool commutatorCompatible = true;
  /// Whether the action filter ran (needs periods on every orbit).
  bool actionChecked = false;

  bool pass() const noexcept { return violations.empty(); }
};

/// Flavor shape, degree drop, positive-puncture rule on p-images, action monotonicity
/// (when periods are present) and, for SFT flavors, d[x, y] = 0 for every pair of q/p generators.
StructureReport validate_structure(const DifferentialSpec& spec);

/// Whether dropping variables maps `source` onto `target` as a chain map.
/// Allowed: rSFT→CH, SFT→CH, X*→X, X*→CH, rSFT*→CH*, SFT*→CH*.
bool projection_defined(Flavor source, Flavor target) noexcept;

/// Drops every monomial carrying a variable `target` lacks. Throws FlavorError for other pairs.
Element project(const Element& e, Flavor target);

/// The projected spec: images of the target's generators pushed through `project`.
DifferentialSpec restrict_spec(const DifferentialSpec& spec, Flavor target);

struct ChainMapMismatch {
  std::string label;
  Element projectedSourceD;
  Element targetDProjected;
};

struct ChainMapReport {
  bool pass = true;
  std::size_t checked = 0;
  std::vector<ChainMapMismatch> mismatches;
};

/// π(d_source x) = d_target(π x) for every generator of `source` and every sample.
ChainMapReport verify_chain_map(const DifferentialSpec& source, const DifferentialSpec& target,
                                const std::vector<Element>& samples);

}  // namespace sft
