#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sftkit/rational.hpp"
#include "sftkit/signature.hpp"

namespace sft {

/// Sparse exponent vector: (index, power) pairs, sorted by index, powers > 0.
using ExponentList = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

/// Normal-ordered monomial e^A q^{I-} p^{I+} t^K hbar^g (coefficient lives in Element).
///
/// Invariants: each block is sorted by index; odd variables never carry an exponent
/// above one (such words vanish and are never stored).
struct Monomial {
  ExponentList q;
  ExponentList p;
  ExponentList t;
  std::uint32_t hbar = 0;
  GroupElement group;

  static Monomial unit(std::size_t rank) { return Monomial{{}, {}, {}, 0, GroupElement::zero(rank)}; }

  std::uint32_t exponent(Var v) const;
  /// Expanded word of the q-, p- and t-blocks, in normal order (hbar and e^A are central).
  std::vector<Var> word() const;

  std::uint32_t q_weight() const noexcept;
  std::uint32_t p_weight() const noexcept;
  std::uint32_t t_weight() const noexcept;
  /// Total exponent of q, p, t and hbar.
  std::uint32_t word_length() const noexcept;
  bool is_unit() const noexcept;

  auto operator<=>(const Monomial&) const = default;
};

/// Whether a monomial uses only variables the flavor provides.
bool admits(Flavor f, const Monomial& m) noexcept;

int degree(const AlgebraSignature& sig, const Monomial& m);

/// Finite exact-rational combination of monomials in one flavor. No zero coefficients are stored.
class Element {
 public:
  using TermMap = std::map<Monomial, Rational>;

  explicit Element(Flavor flavor = Flavor::CH) : flavor_(flavor) {}

  static Element zero(Flavor f) { return Element(f); }
  static Element one(Flavor f, std::size_t rank) { return monomial(f, Monomial::unit(rank)); }
  static Element monomial(Flavor f, const Monomial& m, const Rational& c = 1);

  Flavor flavor() const noexcept { return flavor_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  Rational coefficient(const Monomial& m) const;

  /// Adds c·m; throws FlavorError if the flavor does not admit m.
  void add_term(const Monomial& m, const Rational& c);

  Element& operator+=(const Element& other);
  Element& operator-=(const Element& other);
  Element& operator*=(const Rational& scalar);

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Element a, const Rational& s) { return a *= s; }
  friend Element operator*(const Rational& s, Element a) { return a *= s; }
  Element operator-() const;

  bool operator==(const Element& other) const;

 private:
  Flavor flavor_;
  TermMap terms_;
};

/// Same monomials read in another flavor; throws FlavorError if some monomial is not admitted.
Element embed(const Element& e, Flavor target);

/// Degree of a homogeneous nonzero element; nullopt for zero or inhomogeneous elements.
std::optional<int> homogeneous_degree(const AlgebraSignature& sig, const Element& e);

enum class Parity : std::uint8_t { Even, Odd };

/// degree(v) mod 2. Throws SemanticError for unknown ids.
Parity parity(const AlgebraSignature& sig, Var v);

/// The element c·e^A·v.
Element variable(const AlgebraSignature& sig, Flavor f, Var v, const Rational& c = 1);

/// Canonical form of c·e^A·(word). In supercommutative flavors this is a stable sort whose
/// Koszul sign counts inversions among odd variables; in Weyl flavors the word is multiplied
/// out left to right with the commutator relation.
Element normalize(const AlgebraSignature& sig, Flavor f, std::span<const Var> word, const Rational& c,
                  const GroupElement& group);

/// Bounds that make power-series arithmetic finite. Unset fields are unbounded.
struct TruncationPolicy {
  std::optional<std::uint32_t> maxPWeight;
  std::optional<std::uint32_t> maxHbarWeight;
  std::optional<std::uint32_t> maxTWeight;
  std::optional<std::uint32_t> maxWordLength;
  /// Bound on filtration_weight in the element's flavor (the Weyl-compatible filtration).
  std::optional<std::uint32_t> maxFiltrationWeight;
  /// Bound on the L-infinity norm of e^A.
  std::optional<std::uint32_t> maxGroupNorm;
  /// Bound on Σ (i⁻ + i⁺) T(γ); needs periods.
  std::optional<Rational> maxAction;

  static TruncationPolicy filtration(std::uint32_t weight) {
    TruncationPolicy p;
    p.maxFiltrationWeight = weight;
    return p;
  }

  bool operator==(const TruncationPolicy&) const = default;
};

enum class FiltrationMode : std::uint8_t {
  /// p (rSFT), p + hbar (SFT), plus t in starred flavors.
  Combined,
  /// t-weight only: the filtration of the marked-point lift.
  MarkedOnly,
};

std::uint32_t filtration_weight(const Monomial& m, Flavor f, FiltrationMode mode = FiltrationMode::Combined);

/// Σ (i⁻_j + i⁺_j) T(γ_j); throws SemanticError when periods are missing.
Rational monomial_action(const AlgebraSignature& sig, const Monomial& m);

bool within(const AlgebraSignature& sig, const Monomial& m, Flavor f, const TruncationPolicy& policy);

/// Drops every monomial outside the policy. Linear and idempotent.
Element truncate(const AlgebraSignature& sig, const Element& e, const TruncationPolicy& policy);

/// Supercommutative product (CH, rSFT and starred variants).
Element mul_super(const AlgebraSignature& sig, const Element& a, const Element& b);

/// Product in SFT / SFT*: q's before p's with q_γ p_γ - (-1)^{|q||p|} p_γ q_γ = κ_γ hbar.
Element mul_weyl(const AlgebraSignature& sig, const Element& a, const Element& b);

/// The flavor's product.
Element mul(const AlgebraSignature& sig, const Element& a, const Element& b);

/// The flavor's product, truncated; term pairs that cannot survive are skipped early.
Element mul(const AlgebraSignature& sig, const Element& a, const Element& b, const TruncationPolicy& policy);

}  // namespace sft
