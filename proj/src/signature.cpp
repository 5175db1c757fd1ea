#include "sftkit/signature.hpp"

#include <algorithm>
#include <set>

#include "sftkit/errors.hpp"

namespace sft {

bool has_p(Flavor f) noexcept { return f != Flavor::CH && f != Flavor::CHStar; }

bool has_hbar(Flavor f) noexcept { return f == Flavor::SFT || f == Flavor::SFTStar; }

bool is_starred(Flavor f) noexcept {
  return f == Flavor::CHStar || f == Flavor::rSFTStar || f == Flavor::SFTStar;
}

bool is_weyl(Flavor f) noexcept { return has_hbar(f); }

bool is_power_series(Flavor f) noexcept { return f != Flavor::CH; }

Flavor unstarred(Flavor f) noexcept {
  switch (f) {
    case Flavor::CHStar: return Flavor::CH;
    case Flavor::rSFTStar: return Flavor::rSFT;
    case Flavor::SFTStar: return Flavor::SFT;
    default: return f;
  }
}

Flavor starred(Flavor f) noexcept {
  switch (f) {
    case Flavor::CH: return Flavor::CHStar;
    case Flavor::rSFT: return Flavor::rSFTStar;
    case Flavor::SFT: return Flavor::SFTStar;
    default: return f;
  }
}

std::string_view flavor_name(Flavor f) noexcept {
  switch (f) {
    case Flavor::CH: return "CH";
    case Flavor::rSFT: return "rSFT";
    case Flavor::SFT: return "SFT";
    case Flavor::CHStar: return "CH*";
    case Flavor::rSFTStar: return "rSFT*";
    case Flavor::SFTStar: return "SFT*";
  }
  return "?";
}

Flavor parse_flavor(std::string_view name) {
  for (Flavor f : kAllFlavors)
    if (flavor_name(f) == name) return f;
  throw SemanticError("unknown flavor '" + std::string(name) + "'");
}

bool GroupElement::is_zero() const noexcept {
  return std::all_of(coords.begin(), coords.end(), [](std::int64_t c) { return c == 0; });
}

std::int64_t GroupElement::linf_norm() const noexcept {
  std::int64_t m = 0;
  for (auto c : coords) m = std::max(m, c < 0 ? -c : c);
  return m;
}

GroupElement GroupElement::operator+(const GroupElement& other) const {
  if (coords.size() != other.coords.size()) throw SemanticError("group elements of different rank");
  GroupElement r = *this;
  for (std::size_t i = 0; i < coords.size(); ++i) r.coords[i] += other.coords[i];
  return r;
}

AlgebraSignature::AlgebraSignature(int n, std::vector<std::int64_t> c1, std::vector<OrbitRecord> orbits,
                                   std::vector<TFormRecord> tforms)
    : n_(n), c1_(std::move(c1)), orbits_(std::move(orbits)), tforms_(std::move(tforms)) {
  if (n_ < 1) throw SemanticError("n >= 1");
  std::set<std::string> ids;
  for (const auto& o : orbits_) {
    if (o.id.empty()) throw SemanticError("orbit id must be nonempty");
    if (!ids.insert(o.id).second) throw SemanticError("orbit ids unique: duplicate '" + o.id + "'");
    if (o.kappa < 1) throw SemanticError("kappa >= 1 (orbit '" + o.id + "')");
    if (o.period && *o.period <= 0) throw SemanticError("period > 0 (orbit '" + o.id + "')");
  }
  std::set<std::string> formIds;
  for (const auto& t : tforms_) {
    if (t.id.empty()) throw SemanticError("tform id must be nonempty");
    if (!formIds.insert(t.id).second) throw SemanticError("tform ids unique: duplicate '" + t.id + "'");
    if (t.formDegree > static_cast<std::uint32_t>(2 * n_ - 1))
      throw SemanticError("0 <= formDegree <= 2n-1 (tform '" + t.id + "')");
  }
}

int AlgebraSignature::degree(Var v) const {
  check_var(v);
  switch (v.kind) {
    case VarKind::Q: return orbits_[v.index].cz + n_ - 3;
    case VarKind::P: return -orbits_[v.index].cz + n_ - 3;
    case VarKind::T: return static_cast<int>(tforms_[v.index].formDegree) - 2;
    case VarKind::Hbar: return 2 * (n_ - 3);
  }
  return 0;
}

int AlgebraSignature::degree(const GroupElement& a) const {
  if (a.coords.size() != c1_.size()) throw SemanticError("group element rank differs from h2rank");
  std::int64_t pairing = 0;
  for (std::size_t i = 0; i < c1_.size(); ++i) pairing += c1_[i] * a.coords[i];
  return static_cast<int>(-2 * pairing);
}

bool AlgebraSignature::has_periods() const noexcept {
  return std::all_of(orbits_.begin(), orbits_.end(), [](const OrbitRecord& o) { return o.period.has_value(); });
}

std::optional<std::uint32_t> AlgebraSignature::find_orbit(std::string_view id) const noexcept {
  for (std::size_t i = 0; i < orbits_.size(); ++i)
    if (orbits_[i].id == id) return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

std::optional<std::uint32_t> AlgebraSignature::find_tform(std::string_view id) const noexcept {
  for (std::size_t i = 0; i < tforms_.size(); ++i)
    if (tforms_[i].id == id) return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

std::string AlgebraSignature::var_name(Var v) const {
  check_var(v);
  switch (v.kind) {
    case VarKind::Q: return "q:" + orbits_[v.index].id;
    case VarKind::P: return "p:" + orbits_[v.index].id;
    case VarKind::T: return "t:" + tforms_[v.index].id;
    case VarKind::Hbar: return "hbar";
  }
  return {};
}

Var AlgebraSignature::parse_var(std::string_view name) const {
  if (name == "hbar") return Var::hbar();
  if (name.size() > 2 && name[1] == ':') {
    auto id = name.substr(2);
    if (name[0] == 'q' || name[0] == 'p') {
      if (auto i = find_orbit(id)) return name[0] == 'q' ? Var::q(*i) : Var::p(*i);
    } else if (name[0] == 't') {
      if (auto i = find_tform(id)) return Var::t(*i);
    }
  }
  throw SemanticError("unknown variable '" + std::string(name) + "'");
}

void AlgebraSignature::check_var(Var v) const {
  bool ok = false;
  switch (v.kind) {
    case VarKind::Q:
    case VarKind::P: ok = v.index < orbits_.size(); break;
    case VarKind::T: ok = v.index < tforms_.size(); break;
    case VarKind::Hbar: ok = v.index == 0; break;
  }
  if (!ok) throw SemanticError("unknown variable id");
}

}  // namespace sft
