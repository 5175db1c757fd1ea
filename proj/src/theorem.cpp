#include "sftkit/theorem.hpp"

#include <algorithm>
#include <functional>

#include "sftkit/errors.hpp"

namespace sft {

namespace {

std::string fname(Flavor f) { return std::string(flavor_name(f)); }

void require_zero_residual(const PrimitiveCertificate& cert, const char* what) {
  if (!certificate_residual(cert).is_zero())
    throw VerificationError(std::string(what) + ": d f != 1 in " + fname(cert.flavor));
}

// Sparse exact elimination. Columns are d(basis_j); a pivot's leading row is its
// smallest row index, and `combo` expresses the pivot vector in the original columns.
struct Pivot {
  std::map<std::size_t, Rational> vec;
  std::map<std::size_t, Rational> combo;
};

void axpy(std::map<std::size_t, Rational>& y, const Rational& a, const std::map<std::size_t, Rational>& x) {
  for (const auto& [k, v] : x) {
    Rational& slot = y[k];
    slot += a * v;
    if (slot == 0) y.erase(k);
  }
}

// Eliminates every pivot row from v, accumulating the multipliers into combo.
void reduce(const std::map<std::size_t, Pivot>& pivots, std::map<std::size_t, Rational>& v,
            std::map<std::size_t, Rational>& combo, bool subtractCombo) {
  auto it = v.begin();
  while (it != v.end()) {
    const std::size_t row = it->first;
    auto p = pivots.find(row);
    if (p == pivots.end()) {
      ++it;
      continue;
    }
    const Rational factor = it->second / p->second.vec.at(row);
    axpy(v, -factor, p->second.vec);
    axpy(combo, subtractCombo ? Rational(-factor) : factor, p->second.combo);
    it = v.upper_bound(row);
  }
}

std::vector<Var> search_variables(const DifferentialSpec& spec, const SearchBounds& bounds) {
  const auto& sig = spec.sig;
  const Flavor f = spec.flavor;
  std::vector<Var> vars;
  if (!bounds.generatorSubset.empty()) {
    vars = bounds.generatorSubset;
    for (Var v : vars) {
      sig.check_var(v);
      const bool ok = v.kind == VarKind::Q || (v.kind == VarKind::P && has_p(f)) ||
                      (v.kind == VarKind::T && is_starred(f)) || (v.kind == VarKind::Hbar && has_hbar(f));
      if (!ok) throw FlavorError("flavor " + fname(f) + " has no variable " + sig.var_name(v));
    }
  } else {
    const auto orbits = static_cast<std::uint32_t>(sig.orbits().size());
    for (std::uint32_t i = 0; i < orbits; ++i) vars.push_back(Var::q(i));
    if (has_p(f))
      for (std::uint32_t i = 0; i < orbits; ++i) vars.push_back(Var::p(i));
    if (is_starred(f))
      for (std::uint32_t j = 0; j < sig.tforms().size(); ++j) vars.push_back(Var::t(j));
    if (has_hbar(f)) vars.push_back(Var::hbar());
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

std::vector<Monomial> degree_one_basis(const DifferentialSpec& spec, const SearchBounds& bounds,
                                       std::optional<std::uint32_t> weight) {
  const auto& sig = spec.sig;
  const auto vars = search_variables(spec, bounds);

  std::vector<GroupElement> groups;
  {
    GroupElement g = GroupElement::zero(sig.h2rank());
    const auto b = static_cast<std::int64_t>(bounds.maxGroupNorm);
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
      if (k == g.coords.size()) {
        groups.push_back(g);
        return;
      }
      for (std::int64_t v = -b; v <= b; ++v) {
        g.coords[k] = v;
        rec(k + 1);
      }
    };
    rec(0);
  }

  std::vector<Monomial> basis;
  Monomial m = Monomial::unit(sig.h2rank());
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t k, std::uint32_t left) {
    if (k == vars.size()) {
      if (m.word_length() == 0) return;
      for (const auto& a : groups) {
        m.group = a;
        if (degree(sig, m) != 1) continue;
        if (weight && filtration_weight(m, spec.flavor) > *weight) continue;
        if (bounds.maxAction && monomial_action(sig, m) > *bounds.maxAction) continue;
        basis.push_back(m);
      }
      m.group = GroupElement::zero(sig.h2rank());
      return;
    }
    const Var v = vars[k];
    const std::uint32_t cap = sig.is_odd(v) ? std::min<std::uint32_t>(1, left) : left;
    for (std::uint32_t e = 0; e <= cap; ++e) {
      if (e > 0) {
        switch (v.kind) {
          case VarKind::Q: m.q.emplace_back(v.index, e); break;
          case VarKind::P: m.p.emplace_back(v.index, e); break;
          case VarKind::T: m.t.emplace_back(v.index, e); break;
          case VarKind::Hbar: m.hbar = e; break;
        }
      }
      rec(k + 1, left - e);
      if (e > 0) {
        switch (v.kind) {
          case VarKind::Q: m.q.pop_back(); break;
          case VarKind::P: m.p.pop_back(); break;
          case VarKind::T: m.t.pop_back(); break;
          case VarKind::Hbar: m.hbar = 0; break;
        }
      }
    }
  };
  rec(0, bounds.maxWordLength);
  std::stable_sort(basis.begin(), basis.end(), [](const Monomial& a, const Monomial& b) {
    if (a.word_length() != b.word_length()) return a.word_length() < b.word_length();
    return a < b;
  });
  return basis;
}

}  // namespace

Element certificate_residual(const PrimitiveCertificate& cert) {
  Element r = apply_d(cert.spec, cert.element) - Element::one(cert.flavor, cert.spec.sig.h2rank());
  if (cert.verifiedToWeight > 0) r = truncate(cert.spec.sig, r, TruncationPolicy::filtration(cert.verifiedToWeight));
  return r;
}

std::uint32_t filtration_bound(const TruncationPolicy& policy, Flavor f) {
  if (policy.maxFiltrationWeight) return *policy.maxFiltrationWeight;
  std::uint32_t k = 0;
  auto need = [&](const std::optional<std::uint32_t>& b, const char* name) {
    if (!b) throw UnboundedError(std::string("formal series in ") + fname(f) + " needs " + name);
    k += *b;
  };
  if (has_p(f)) need(policy.maxPWeight, "maxPWeight");
  if (has_hbar(f)) need(policy.maxHbarWeight, "maxHbarWeight");
  if (is_starred(f)) need(policy.maxTWeight, "maxTWeight");
  return k;
}

Element formal_inverse(const AlgebraSignature& sig, const Element& g, const TruncationPolicy& policy) {
  const Flavor f = g.flavor();
  for (const auto& [m, c] : g.terms())
    if (filtration_weight(m, f) == 0)
      throw IllDefinedSeriesError("g has a term of filtration weight 0; Σ g^k does not converge");
  const std::uint32_t k = filtration_bound(policy, f);
  const auto step = TruncationPolicy::filtration(k);
  Element result = Element::one(f, sig.h2rank());
  Element power = result;
  for (std::uint32_t i = 1; i <= k; ++i) {
    power = mul(sig, power, g, step);
    if (power.is_zero()) break;
    result += power;
  }
  return truncate(sig, result, policy);
}

bool lift_defined(Flavor source, Flavor target) noexcept { return projection_defined(target, source); }

PrimitiveCertificate lift_primitive(const PrimitiveCertificate& f0, Flavor target, const DifferentialSpec& targetSpec,
                                    const TruncationPolicy& policy) {
  if (!lift_defined(f0.flavor, target)) throw FlavorError("no lift " + fname(f0.flavor) + " -> " + fname(target));
  if (targetSpec.flavor != target) throw FlavorError("target spec is in flavor " + fname(targetSpec.flavor));
  if (!(restrict_spec(targetSpec, f0.flavor) == f0.spec))
    throw SemanticError("target spec does not restrict to the spec of the given primitive");
  require_zero_residual(f0, "source primitive");

  const auto& sig = targetSpec.sig;
  const Element e0 = embed(f0.element, target);
  const Element g = Element::one(target, sig.h2rank()) - apply_d(targetSpec, e0);
  if (g.is_zero() && f0.verifiedToWeight == 0) return {target, e0, 0, targetSpec};

  const std::uint32_t k = filtration_bound(policy, target);
  if (k == 0) throw UnboundedError("lift into " + fname(target) + " needs a filtration bound >= 1");
  const auto cut = TruncationPolicy::filtration(k);
  Element f = truncate(sig, mul(sig, e0, formal_inverse(sig, g, cut), cut), policy);
  PrimitiveCertificate cert{target, std::move(f), k, targetSpec};
  require_zero_residual(cert, "lifted primitive");
  return cert;
}

PrimitiveCertificate project_primitive(const PrimitiveCertificate& f, Flavor target,
                                       const DifferentialSpec& targetSpec) {
  if (!projection_defined(f.flavor, target))
    throw FlavorError("no projection " + fname(f.flavor) + " -> " + fname(target));
  if (targetSpec.flavor != target) throw FlavorError("target spec is in flavor " + fname(targetSpec.flavor));
  const auto chain = verify_chain_map(f.spec, targetSpec, {f.element});
  if (!chain.pass) throw VerificationError("projection is not a chain map for these specs");
  // Monomials of positive weight die under the projection to CH, so that image is exact.
  const std::uint32_t w = is_power_series(target) ? f.verifiedToWeight : 0;
  PrimitiveCertificate cert{target, project(f.element, target), w, targetSpec};
  require_zero_residual(cert, "projected primitive");
  return cert;
}

PrimitiveSearch find_unit_primitive(const DifferentialSpec& spec, const SearchBounds& bounds) {
  const auto& sig = spec.sig;
  const Flavor f = spec.flavor;
  PrimitiveSearch out;
  std::optional<std::uint32_t> weight;
  if (is_power_series(f)) {
    if (bounds.weight == 0) throw UnboundedError("power-series search needs weight >= 1");
    weight = bounds.weight;
  }
  const auto basis = degree_one_basis(spec, bounds, weight);
  out.basisSize = basis.size();
  if (basis.empty()) {
    out.reason = "empty degree-1 basis";
    return out;
  }

  std::vector<Element> images;
  images.reserve(basis.size());
  std::map<Monomial, std::size_t> rowIndex;
  for (const auto& b : basis) {
    Element img = apply_d(spec, Element::monomial(f, b));
    if (weight) img = truncate(sig, img, TruncationPolicy::filtration(*weight));
    for (const auto& [m, c] : img.terms()) rowIndex.emplace(m, 0);
    images.push_back(std::move(img));
  }
  std::size_t next = 0;
  for (auto& [m, idx] : rowIndex) idx = next++;
  out.rowCount = rowIndex.size();

  const auto unitRow = rowIndex.find(Monomial::unit(sig.h2rank()));
  if (unitRow == rowIndex.end()) {
    out.reason = "the unit does not occur in d of any basis monomial";
    return out;
  }

  std::map<std::size_t, Pivot> pivots;
  for (std::size_t j = 0; j < images.size(); ++j) {
    Pivot p;
    for (const auto& [m, c] : images[j].terms()) p.vec.emplace(rowIndex.at(m), c);
    p.combo.emplace(j, 1);
    reduce(pivots, p.vec, p.combo, true);
    if (p.vec.empty()) continue;
    const std::size_t lead = p.vec.begin()->first;
    pivots.emplace(lead, std::move(p));
  }

  std::map<std::size_t, Rational> target{{unitRow->second, Rational(1)}};
  std::map<std::size_t, Rational> x;
  reduce(pivots, target, x, false);
  if (!target.empty()) {
    out.reason = "the unit is not in the image of d within bounds";
    return out;
  }

  Element a(f);
  for (const auto& [j, c] : x) a.add_term(basis[j], c);
  PrimitiveCertificate cert{f, std::move(a), weight.value_or(0), spec};
  require_zero_residual(cert, "solver output");
  out.certificate = std::move(cert);
  return out;
}

std::map<Flavor, DifferentialSpec> complete_family(const std::map<Flavor, DifferentialSpec>& specs,
                                                   std::vector<Flavor>* synthesized) {
  if (specs.empty()) throw SemanticError("empty spec family");
  const AlgebraSignature& sig = specs.begin()->second.sig;
  for (const auto& [f, s] : specs) {
    if (s.flavor != f) throw SemanticError("family entry keyed " + fname(f) + " holds a " + fname(s.flavor) + " spec");
    if (!(s.sig == sig)) throw SemanticError("specs of one family must share the contact data");
  }
  auto check_pairs = [](const std::map<Flavor, DifferentialSpec>& family) {
    for (const auto& [a, sa] : family)
      for (const auto& [b, sb] : family)
        if (projection_defined(a, b) && !(restrict_spec(sa, b) == sb))
          throw SemanticError("incompatible spec family: " + fname(a) + " does not restrict to the given " + fname(b));
  };
  check_pairs(specs);

  std::map<Flavor, DifferentialSpec> family = specs;
  auto add = [&](Flavor f, DifferentialSpec s) {
    family.emplace(f, std::move(s));
    if (synthesized) synthesized->push_back(f);
  };
  // Restrictions from the richest supplied spec first.
  const Flavor richest[] = {Flavor::SFTStar, Flavor::rSFTStar, Flavor::SFT, Flavor::rSFT, Flavor::CHStar};
  for (Flavor target : kAllFlavors) {
    if (family.contains(target)) continue;
    for (Flavor source : richest) {
      auto it = specs.find(source);
      if (it != specs.end() && projection_defined(source, target)) {
        add(target, restrict_spec(it->second, target));
        break;
      }
    }
  }
  // What is left embeds a poorer spec: p-images are zero and marked terms come from CH*.
  const DifferentialSpec& ch = family.at(Flavor::CH);
  auto embedded = [&](Flavor target, const DifferentialSpec& base) {
    DifferentialSpec s = zero_differential(sig, target);
    for (const auto& [v, img] : base.images) s.images[v] = embed(img, target);
    if (is_starred(target) && family.contains(Flavor::CHStar)) {
      for (const auto& [v, img] : family.at(Flavor::CHStar).images) {
        const Element marked = embed(img - embed(ch.image(v), Flavor::CHStar), target);
        s.images[v] += marked;
      }
    }
    return s;
  };
  for (Flavor target : {Flavor::rSFT, Flavor::SFT, Flavor::CHStar})
    if (!family.contains(target)) add(target, embedded(target, ch));
  for (Flavor target : {Flavor::rSFTStar, Flavor::SFTStar})
    if (!family.contains(target)) add(target, embedded(target, family.at(unstarred(target))));
  check_pairs(family);
  return family;
}

ClassificationReport classify(const std::map<Flavor, DifferentialSpec>& specs, const SearchBounds& bounds,
                              const TruncationPolicy& policy) {
  ClassificationReport report;
  const auto family = complete_family(specs, &report.synthesized);

  std::vector<Flavor> order;
  for (Flavor f : kAllFlavors)
    if (specs.contains(f)) order.push_back(f);
  for (Flavor f : kAllFlavors)
    if (!specs.contains(f)) order.push_back(f);

  std::optional<PrimitiveCertificate> found;
  for (Flavor f : order) {
    report.searched.push_back(f);
    auto search = find_unit_primitive(family.at(f), bounds);
    if (search.certificate) {
      found = std::move(search.certificate);
      break;
    }
  }
  if (!found) {
    report.verdict = Verdict::NoneWithinBounds;
    report.notes.emplace_back(kSemidecisionCaveat);
    return report;
  }

  report.verdict = Verdict::Vanishes;
  report.foundIn = found->flavor;
  auto& certs = report.certificates;
  certs.emplace(found->flavor, *found);
  auto attempt = [&](Flavor target, auto&& make) {
    if (certs.contains(target)) return;
    try {
      certs.emplace(target, make());
    } catch (const Error& e) {
      report.notes.push_back(fname(target) + " certificate not derived: " + e.what());
    }
  };
  attempt(Flavor::CH, [&] { return project_primitive(*found, Flavor::CH, family.at(Flavor::CH)); });
  if (!certs.contains(Flavor::CH)) return report;
  for (Flavor target : {Flavor::rSFT, Flavor::SFT, Flavor::CHStar})
    attempt(target, [&] { return lift_primitive(certs.at(Flavor::CH), target, family.at(target), policy); });
  for (Flavor target : {Flavor::rSFTStar, Flavor::SFTStar}) {
    const Flavor base = unstarred(target);
    if (!certs.contains(base)) continue;
    attempt(target, [&] { return lift_primitive(certs.at(base), target, family.at(target), policy); });
  }
  return report;
}

}  // namespace sft
