#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sftkit/rational.hpp"

namespace sft {

/// The six graded algebras. Starred flavors carry marked-point variables t_j.
enum class Flavor : std::uint8_t { CH, rSFT, SFT, CHStar, rSFTStar, SFTStar };

inline constexpr Flavor kAllFlavors[] = {Flavor::CH,     Flavor::rSFT,     Flavor::SFT,
                                         Flavor::CHStar, Flavor::rSFTStar, Flavor::SFTStar};

bool has_p(Flavor f) noexcept;
bool has_hbar(Flavor f) noexcept;
bool is_starred(Flavor f) noexcept;
/// Full SFT flavors multiply with the Weyl relation; the rest are supercommutative.
bool is_weyl(Flavor f) noexcept;
/// True for flavors whose elements are formal power series (everything but CH).
bool is_power_series(Flavor f) noexcept;
/// X* -> X; unstarred flavors map to themselves.
Flavor unstarred(Flavor f) noexcept;
/// X -> X*; starred flavors map to themselves.
Flavor starred(Flavor f) noexcept;

std::string_view flavor_name(Flavor f) noexcept;
/// Accepts "CH", "rSFT", "SFT", "CH*", "rSFT*", "SFT*". Throws SemanticError.
Flavor parse_flavor(std::string_view name);

/// Variable kinds in normal-order position: q-block, p-block, t-block. hbar is central.
enum class VarKind : std::uint8_t { Q, P, T, Hbar };

/// A generator of the algebra: q_γ / p_γ index into the orbit list, t_j into the form list.
struct Var {
  VarKind kind = VarKind::Q;
  std::uint32_t index = 0;

  auto operator<=>(const Var&) const = default;

  static constexpr Var q(std::uint32_t i) { return {VarKind::Q, i}; }
  static constexpr Var p(std::uint32_t i) { return {VarKind::P, i}; }
  static constexpr Var t(std::uint32_t i) { return {VarKind::T, i}; }
  static constexpr Var hbar() { return {VarKind::Hbar, 0}; }
};

/// Element of H_2(M;Z)/R presented as Z^b; the group law is componentwise addition.
struct GroupElement {
  std::vector<std::int64_t> coords;

  GroupElement() = default;
  explicit GroupElement(std::vector<std::int64_t> c) : coords(std::move(c)) {}
  static GroupElement zero(std::size_t rank) { return GroupElement(std::vector<std::int64_t>(rank, 0)); }

  bool is_zero() const noexcept;
  std::int64_t linf_norm() const noexcept;
  GroupElement operator+(const GroupElement& other) const;

  auto operator<=>(const GroupElement&) const = default;
};

struct OrbitRecord {
  std::string id;
  int cz = 0;
  std::uint32_t kappa = 1;
  /// T(γ); the action filter is off when any orbit lacks a period.
  std::optional<Rational> period;

  bool operator==(const OrbitRecord&) const = default;
};

struct TFormRecord {
  std::string id;
  std::uint32_t formDegree = 0;

  bool operator==(const TFormRecord&) const = default;
};

/// Discrete contact data: dimension 2n-1, c_1 pairing on Z^b, Reeb orbits, forms.
class AlgebraSignature {
 public:
  AlgebraSignature() = default;
  /// Validates every invariant and throws SemanticError naming the broken one.
  AlgebraSignature(int n, std::vector<std::int64_t> c1, std::vector<OrbitRecord> orbits,
                   std::vector<TFormRecord> tforms = {});

  int n() const noexcept { return n_; }
  std::size_t h2rank() const noexcept { return c1_.size(); }
  const std::vector<std::int64_t>& c1() const noexcept { return c1_; }
  const std::vector<OrbitRecord>& orbits() const noexcept { return orbits_; }
  const std::vector<TFormRecord>& tforms() const noexcept { return tforms_; }
  const OrbitRecord& orbit(std::uint32_t i) const { return orbits_.at(i); }

  /// |q| = CZ + n - 3, |p| = -CZ + n - 3, |t| = deg Θ - 2, |hbar| = 2(n - 3).
  int degree(Var v) const;
  /// |e^A| = -2 <c_1, A>.
  int degree(const GroupElement& a) const;
  bool is_odd(Var v) const { return (degree(v) & 1) != 0; }

  bool has_periods() const noexcept;
  std::optional<std::uint32_t> find_orbit(std::string_view id) const noexcept;
  std::optional<std::uint32_t> find_tform(std::string_view id) const noexcept;

  /// "q:a", "p:a", "t:theta1", "hbar".
  std::string var_name(Var v) const;
  Var parse_var(std::string_view name) const;
  /// Throws SemanticError if v does not resolve in this signature.
  void check_var(Var v) const;

  bool operator==(const AlgebraSignature&) const = default;

 private:
  int n_ = 1;
  std::vector<std::int64_t> c1_;
  std::vector<OrbitRecord> orbits_;
  std::vector<TFormRecord> tforms_;
};

}  // namespace sft
