#include "sftkit/differential.hpp"

#include <sstream>

#include "sftkit/errors.hpp"
#include "sftkit/index_calculus.hpp"

namespace sft {

namespace {

bool generator_allowed(Flavor f, Var v) {
  return v.kind == VarKind::Q || (v.kind == VarKind::P && has_p(f));
}

}  // namespace

const Element& DifferentialSpec::image(Var v) const {
  auto it = images.find(v);
  if (it == images.end()) throw MissingImageError("no image for generator " + sig.var_name(v));
  return it->second;
}

DifferentialSpec inner_differential(const AlgebraSignature& sig, Flavor flavor, const Element& h) {
  if (!is_weyl(flavor) || h.flavor() != flavor) throw FlavorError("inner_differential needs H in SFT or SFT*");
  const auto deg = homogeneous_degree(sig, h);
  if (!h.is_zero() && (!deg || (*deg & 1) == 0)) throw SemanticError("H must be homogeneous of odd degree");
  DifferentialSpec spec{flavor, sig, {}};
  for (std::uint32_t i = 0; i < sig.orbits().size(); ++i) {
    for (Var x : {Var::q(i), Var::p(i)}) {
      const Element gx = variable(sig, flavor, x);
      const Element bracket = mul_weyl(sig, h, gx) + Rational(sig.is_odd(x) ? 1 : -1) * mul_weyl(sig, gx, h);
      Element image(flavor);
      for (const auto& [m, c] : bracket.terms()) {
        if (m.hbar == 0) throw SemanticError("[H, x] not divisible by hbar");
        Monomial reduced = m;
        --reduced.hbar;
        image.add_term(reduced, c);
      }
      spec.images.emplace(x, std::move(image));
    }
  }
  return spec;
}

DifferentialSpec zero_differential(const AlgebraSignature& sig, Flavor flavor) {
  DifferentialSpec spec{flavor, sig, {}};
  for (std::uint32_t i = 0; i < sig.orbits().size(); ++i) {
    spec.images.emplace(Var::q(i), Element(flavor));
    if (has_p(flavor)) spec.images.emplace(Var::p(i), Element(flavor));
  }
  return spec;
}

Element apply_d_word(const DifferentialSpec& spec, std::span<const Var> word, const Rational& c,
                     const GroupElement& group) {
  const auto& sig = spec.sig;
  const Flavor f = spec.flavor;
  Element result(f);
  int prefixParity = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    const Var x = word[i];
    const int xParity = sig.is_odd(x) ? 1 : 0;
    if (x.kind == VarKind::T || x.kind == VarKind::Hbar) {
      prefixParity ^= xParity;
      continue;
    }
    const Element& dx = spec.image(x);
    if (!dx.is_zero()) {
      Element prefix = normalize(sig, f, word.subspan(0, i), prefixParity ? Rational(-c) : c, group);
      Element suffix = normalize(sig, f, word.subspan(i + 1), 1, GroupElement::zero(sig.h2rank()));
      result += mul(sig, mul(sig, prefix, dx), suffix);
    }
    prefixParity ^= xParity;
  }
  return result;
}

Element apply_d(const DifferentialSpec& spec, const Element& e) {
  if (e.flavor() != spec.flavor)
    throw FlavorError("element flavor " + std::string(flavor_name(e.flavor())) + " differs from spec flavor " +
                      std::string(flavor_name(spec.flavor)));
  Element result(spec.flavor);
  for (const auto& [m, c] : e.terms()) {
    const auto word = m.word();
    Element term = apply_d_word(spec, word, c, m.group);
    if (m.hbar != 0 && !term.is_zero()) {
      // hbar is central and even: reattach it.
      Monomial h = Monomial::unit(spec.sig.h2rank());
      h.hbar = m.hbar;
      term = mul(spec.sig, Element::monomial(spec.flavor, h), term);
    }
    result += term;
  }
  return result;
}

DSquaredReport check_d_squared(const DifferentialSpec& spec, const std::optional<TruncationPolicy>& policy) {
  DSquaredReport report;
  if (policy && is_power_series(spec.flavor))
    report.verifiedToWeight = policy->maxFiltrationWeight ? *policy->maxFiltrationWeight : 0;
  for (const auto& [v, image] : spec.images) {
    Element r = apply_d(spec, image);
    if (policy) r = truncate(spec.sig, r, *policy);
    if (!r.is_zero()) {
      report.pass = false;
      report.failures.push_back({v, std::move(r)});
    }
  }
  return report;
}

std::string_view violation_name(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::FlavorShape: return "flavor-shape";
    case ViolationKind::DegreeDrop: return "degree-drop";
    case ViolationKind::PositivePuncture: return "positive-puncture";
    case ViolationKind::Action: return "action";
    case ViolationKind::CommutatorCompatibility: return "commutator-compatibility";
    case ViolationKind::MissingImage: return "missing-image";
  }
  return "?";
}

StructureReport validate_structure(const DifferentialSpec& spec) {
  StructureReport report;
  const auto& sig = spec.sig;
  const Flavor f = spec.flavor;
  auto add = [&](ViolationKind k, Var v, std::string detail) { report.violations.push_back({k, v, std::move(detail)}); };

  report.actionChecked = sig.has_periods();
  for (const auto& [v, image] : spec.images) {
    if (!generator_allowed(f, v)) {
      add(ViolationKind::FlavorShape, v, "flavor " + std::string(flavor_name(f)) + " has no generator of this kind");
      continue;
    }
    if (image.flavor() != f) {
      add(ViolationKind::FlavorShape, v, "image lives in flavor " + std::string(flavor_name(image.flavor())));
      continue;
    }
    if (!degree_drop_check(sig, image, v)) {
      std::ostringstream os;
      os << "image terms must have degree " << sig.degree(v) - 1;
      add(ViolationKind::DegreeDrop, v, os.str());
    }
    for (const auto& [m, c] : image.terms()) {
      if (v.kind == VarKind::P && m.p_weight() == 0) {
        add(ViolationKind::PositivePuncture, v, "term without p-variables in the image of a p-generator");
        break;
      }
    }
    if (report.actionChecked) {
      const Rational extra = *sig.orbit(v.index).period;
      for (const auto& [m, c] : image.terms()) {
        Monomial below = m;
        below.p.clear();
        Monomial above = m;
        above.q.clear();
        const Rational lo = monomial_action(sig, below);
        const Rational hi = monomial_action(sig, above);
        const bool ok = v.kind == VarKind::Q ? lo < extra + hi : extra + lo < hi;
        if (!ok) {
          add(ViolationKind::Action, v, "negative-end action must stay below positive-end action");
          break;
        }
      }
    }
  }

  for (std::uint32_t i = 0; i < sig.orbits().size(); ++i) {
    if (!spec.images.contains(Var::q(i))) add(ViolationKind::MissingImage, Var::q(i), "no image");
    if (has_p(f) && !spec.images.contains(Var::p(i))) add(ViolationKind::MissingImage, Var::p(i), "no image");
  }

  if (is_weyl(f) && report.pass()) {
    // Every relation x y - (-1)^{|x||y|} y x is a multiple of hbar (closed), so d must kill it.
    std::vector<Var> gens;
    for (std::uint32_t i = 0; i < sig.orbits().size(); ++i) {
      gens.push_back(Var::q(i));
      gens.push_back(Var::p(i));
    }
    const auto zero = GroupElement::zero(sig.h2rank());
    for (std::size_t i = 0; i < gens.size(); ++i) {
      for (std::size_t j = i; j < gens.size(); ++j) {
        const Var xy[] = {gens[i], gens[j]};
        const Var yx[] = {gens[j], gens[i]};
        const bool sOdd = sig.is_odd(gens[i]) && sig.is_odd(gens[j]);
        const Element lhs = apply_d_word(spec, xy, 1, zero) - apply_d_word(spec, yx, sOdd ? -1 : 1, zero);
        if (!lhs.is_zero()) {
          report.commutatorCompatible = false;
          add(ViolationKind::CommutatorCompatibility, gens[i],
              "d[" + sig.var_name(gens[i]) + ", " + sig.var_name(gens[j]) + "] != 0; spec kept as formal, d^2 unchecked");
        }
      }
    }
  }
  return report;
}

bool projection_defined(Flavor source, Flavor target) noexcept {
  if (source == target) return false;
  if (target == Flavor::CH) return true;
  if (is_starred(source) && target == unstarred(source)) return true;
  if (target == Flavor::CHStar) return source == Flavor::rSFTStar || source == Flavor::SFTStar;
  return false;
}

Element project(const Element& e, Flavor target) {
  if (!projection_defined(e.flavor(), target))
    throw FlavorError("no projection " + std::string(flavor_name(e.flavor())) + " -> " +
                      std::string(flavor_name(target)));
  Element r(target);
  for (const auto& [m, c] : e.terms())
    if (admits(target, m)) r.add_term(m, c);
  return r;
}

DifferentialSpec restrict_spec(const DifferentialSpec& spec, Flavor target) {
  if (!projection_defined(spec.flavor, target))
    throw FlavorError("no restriction " + std::string(flavor_name(spec.flavor)) + " -> " +
                      std::string(flavor_name(target)));
  DifferentialSpec r{target, spec.sig, {}};
  for (const auto& [v, image] : spec.images) {
    if (!generator_allowed(target, v)) continue;
    r.images.emplace(v, project(image, target));
  }
  return r;
}

ChainMapReport verify_chain_map(const DifferentialSpec& source, const DifferentialSpec& target,
                                const std::vector<Element>& samples) {
  if (!projection_defined(source.flavor, target.flavor))
    throw FlavorError("no projection " + std::string(flavor_name(source.flavor)) + " -> " +
                      std::string(flavor_name(target.flavor)));
  if (!(source.sig == target.sig)) throw SemanticError("chain map between different signatures");
  ChainMapReport report;
  auto check = [&](const std::string& label, const Element& x) {
    ++report.checked;
    Element lhs = project(apply_d(source, x), target.flavor);
    Element rhs = apply_d(target, project(x, target.flavor));
    if (!(lhs == rhs)) {
      report.pass = false;
      report.mismatches.push_back({label, std::move(lhs), std::move(rhs)});
    }
  };
  for (const auto& [v, image] : source.images) check(source.sig.var_name(v), variable(source.sig, source.flavor, v));
  for (std::size_t i = 0; i < samples.size(); ++i) check("sample " + std::to_string(i), samples[i]);
  return report;
}

}  // namespace sft
