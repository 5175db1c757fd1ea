#include <doctest.h>

#include "oracles.hpp"
#include "sftkit/corpus.hpp"
#include "sftkit/differential.hpp"
#include "sftkit/errors.hpp"

using namespace sft;
using sft::testing::Rng;

namespace {

// a: CZ 2 (|q_a| = 1), b: CZ 3 (|q_b| = 2), c: CZ 4 (|q_c| = 3).
AlgebraSignature abc() { return AlgebraSignature(2, {}, {{"a", 2, 1, {}}, {"b", 3, 1, {}}, {"c", 4, 1, {}}}); }

Element var(const AlgebraSignature& sig, Flavor f, Var v) { return variable(sig, f, v); }

Element leibniz_rhs(const DifferentialSpec& spec, const Monomial& a, const Element& b) {
  const Element ea = Element::monomial(spec.flavor, a);
  const bool odd = degree(spec.sig, a) & 1;
  return mul(spec.sig, apply_d(spec, ea), b) + (odd ? Rational(-1) : Rational(1)) * mul(spec.sig, ea, apply_d(spec, b));
}

}  // namespace

TEST_CASE("apply_d examples") {
  const auto sig = abc();
  DifferentialSpec spec = zero_differential(sig, Flavor::CH);
  const Element one = Element::one(Flavor::CH, 0);
  spec.images[Var::q(0)] = one;
  CHECK(apply_d(spec, one).is_zero());

  spec.images[Var::q(1)] = var(sig, Flavor::CH, Var::q(0));
  CHECK(apply_d(spec, var(sig, Flavor::CH, Var::q(1))) == var(sig, Flavor::CH, Var::q(0)));

  const Element qaqb = mul(sig, var(sig, Flavor::CH, Var::q(0)), var(sig, Flavor::CH, Var::q(1)));
  const Element expected =
      var(sig, Flavor::CH, Var::q(1)) - mul(sig, var(sig, Flavor::CH, Var::q(0)), spec.image(Var::q(1)));
  CHECK(apply_d(spec, qaqb) == expected);
  CHECK(apply_d(spec, qaqb) == var(sig, Flavor::CH, Var::q(1)));

  DifferentialSpec partial{Flavor::CH, sig, {}};
  CHECK_THROWS_AS(apply_d(partial, var(sig, Flavor::CH, Var::q(0))), MissingImageError);
  CHECK_THROWS_AS(apply_d(spec, Element::one(Flavor::rSFT, 0)), FlavorError);
}

TEST_CASE("check_d_squared examples") {
  const auto sig = abc();
  DifferentialSpec spec = zero_differential(sig, Flavor::CH);
  spec.images[Var::q(0)] = Element::one(Flavor::CH, 0);
  spec.images[Var::q(1)] = mul(sig, var(sig, Flavor::CH, Var::q(0)), var(sig, Flavor::CH, Var::q(2)));
  const auto report = check_d_squared(spec);
  CHECK_FALSE(report.pass);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].generator == Var::q(1));
  CHECK(report.failures[0].residual == var(sig, Flavor::CH, Var::q(2)));

  CHECK(check_d_squared(zero_differential(sig, Flavor::SFT)).pass);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto entry = random_layered_spec(seed);
    for (const auto& [f, s] : entry.specs) CHECK(check_d_squared(s).pass);
  }
}

TEST_CASE("validate_structure examples") {
  const AlgebraSignature sig(2, {}, {{"a", 2, 1, {}}, {"b", 3, 1, {}}, {"c", 6, 1, {}}});
  SUBCASE("p-image without p variables") {
    DifferentialSpec spec = zero_differential(sig, Flavor::rSFT);
    spec.images[Var::p(1)] = var(sig, Flavor::rSFT, Var::q(2));
    const auto r = validate_structure(spec);
    CHECK_FALSE(r.pass());
    bool found = false;
    for (const auto& v : r.violations) found |= v.kind == ViolationKind::PositivePuncture && v.generator == Var::p(1);
    CHECK(found);
  }
  SUBCASE("CH image carrying p") {
    DifferentialSpec spec = zero_differential(sig, Flavor::CH);
    spec.images[Var::q(0)] = var(sig, Flavor::rSFT, Var::p(1));
    const auto r = validate_structure(spec);
    REQUIRE_FALSE(r.pass());
    CHECK(r.violations[0].kind == ViolationKind::FlavorShape);
  }
  SUBCASE("degree drop") {
    DifferentialSpec spec = zero_differential(sig, Flavor::CH);
    spec.images[Var::q(1)] = var(sig, Flavor::CH, Var::q(1));
    const auto r = validate_structure(spec);
    REQUIRE_FALSE(r.pass());
    CHECK(r.violations[0].kind == ViolationKind::DegreeDrop);
  }
  SUBCASE("missing image") {
    DifferentialSpec spec{Flavor::CH, sig, {}};
    CHECK(validate_structure(spec).violations.size() == 3);
  }
  SUBCASE("toy overtwisted passes in every flavor") {
    const auto entry = toy_overtwisted();
    for (const auto& [f, s] : entry.specs) {
      const auto r = validate_structure(s);
      CHECK(r.pass());
      CHECK(r.actionChecked);
    }
  }
  SUBCASE("action monotonicity") {
    const AlgebraSignature withT(2, {}, {{"a", 2, 1, Rational(1)}, {"b", 3, 1, Rational(2)}});
    DifferentialSpec spec = zero_differential(withT, Flavor::SFT);
    Monomial m = Monomial::unit(0);
    m.q = {{1, 1}};
    m.hbar = 1;
    spec.images[Var::q(0)] = Element::one(Flavor::SFT, 0) + Element::monomial(Flavor::SFT, m);
    const auto r = validate_structure(spec);
    REQUIRE_FALSE(r.pass());
    CHECK(r.violations[0].kind == ViolationKind::Action);
  }
  SUBCASE("commutator incompatibility downgrades the spec") {
    // q_a even; d p_a = p_a q_o has the right degree and a p-factor, but d[q_a, p_a] = κ hbar q_o.
    const AlgebraSignature s2(2, {}, {{"a", 3, 1, {}}, {"o", 0, 1, {}}});
    DifferentialSpec spec = zero_differential(s2, Flavor::SFT);
    spec.images[Var::p(0)] = mul(s2, var(s2, Flavor::SFT, Var::p(0)), var(s2, Flavor::SFT, Var::q(1)));
    const auto r = validate_structure(spec);
    CHECK_FALSE(r.commutatorCompatible);
  }
  SUBCASE("relations between different orbits count too") {
    // d q_a = 1 - q_c p_b alone breaks q_a q_b - q_b q_a = 0, since p_b does not commute with q_b.
    const AlgebraSignature s3(2, {}, {{"a", 2, 1, {}}, {"b", 3, 1, {}}, {"c", 5, 1, {}}});
    DifferentialSpec spec = zero_differential(s3, Flavor::SFT);
    spec.images[Var::q(0)] = Element::one(Flavor::SFT, 0) -
                             mul(s3, var(s3, Flavor::SFT, Var::q(2)), var(s3, Flavor::SFT, Var::p(1)));
    const auto r = validate_structure(spec);
    CHECK_FALSE(r.commutatorCompatible);
    bool namesPair = false;
    for (const auto& v : r.violations) namesPair |= v.detail.find("d[q:a, q:b]") != std::string::npos;
    CHECK(namesPair);
    // The same image in rSFT is fine: the algebra is supercommutative.
    DifferentialSpec rational = zero_differential(s3, Flavor::rSFT);
    rational.images[Var::q(0)] = Element::one(Flavor::rSFT, 0) -
                                 mul(s3, var(s3, Flavor::rSFT, Var::q(2)), var(s3, Flavor::rSFT, Var::p(1)));
    CHECK(validate_structure(rational).pass());
  }
}

TEST_CASE("inner differentials") {
  const AlgebraSignature sig(2, {}, {{"a", 2, 1, {}}, {"b", 3, 2, {}}, {"c", 5, 1, {}}});
  const Flavor f = Flavor::SFT;
  // H = p_a gives d q_a = κ_a and nothing else.
  const auto simple = inner_differential(sig, f, var(sig, f, Var::p(0)));
  CHECK(simple.image(Var::q(0)) == Element::one(f, 0));
  CHECK(simple.image(Var::p(0)).is_zero());
  CHECK(simple.image(Var::q(1)).is_zero());

  // H = p_a (1 - q_c p_b): d p_c = -κ_c p_a p_b and d q_b = κ_b p_a q_c.
  const Element g = Element::one(f, 0) - mul(sig, var(sig, f, Var::q(2)), var(sig, f, Var::p(1)));
  const auto spec = inner_differential(sig, f, mul(sig, var(sig, f, Var::p(0)), g));
  CHECK(spec.image(Var::q(0)) == g);
  CHECK(spec.image(Var::q(1)) == 2 * mul(sig, var(sig, f, Var::p(0)), var(sig, f, Var::q(2))));
  CHECK(spec.image(Var::p(2)) == -mul(sig, var(sig, f, Var::p(0)), var(sig, f, Var::p(1))));
  CHECK(validate_structure(spec).pass());
  CHECK(check_d_squared(spec).pass);

  CHECK_THROWS_AS(inner_differential(sig, f, var(sig, f, Var::q(1))), SemanticError);
  CHECK_THROWS_AS(inner_differential(sig, Flavor::rSFT, var(sig, Flavor::rSFT, Var::p(0))), FlavorError);
}

TEST_CASE("projection and restriction") {
  const AlgebraSignature sig(2, {}, {{"a", 2, 1, {}}, {"b", 3, 1, {}}, {"c", 5, 1, {}}}, {{"x", 2}});
  const Element qa = var(sig, Flavor::rSFT, Var::q(0));
  CHECK(project(qa + mul(sig, var(sig, Flavor::rSFT, Var::q(1)), var(sig, Flavor::rSFT, Var::p(2))), Flavor::CH) ==
        var(sig, Flavor::CH, Var::q(0)));
  CHECK(project(var(sig, Flavor::SFT, Var::q(0)) + var(sig, Flavor::SFT, Var::hbar()), Flavor::CH) ==
        var(sig, Flavor::CH, Var::q(0)));
  CHECK(project(var(sig, Flavor::CHStar, Var::q(0)) +
                    mul(sig, var(sig, Flavor::CHStar, Var::t(0)), var(sig, Flavor::CHStar, Var::q(1))),
                Flavor::CH) == var(sig, Flavor::CH, Var::q(0)));
  CHECK_THROWS_AS(project(qa, Flavor::SFT), FlavorError);
  CHECK_THROWS_AS(project(var(sig, Flavor::SFT, Var::q(0)), Flavor::rSFT), FlavorError);
  CHECK(projection_defined(Flavor::SFTStar, Flavor::CHStar));
  CHECK_FALSE(projection_defined(Flavor::CH, Flavor::CH));

  DifferentialSpec r = zero_differential(sig, Flavor::rSFT);
  r.images[Var::q(0)] = Element::one(Flavor::rSFT, 0) -
                        mul(sig, var(sig, Flavor::rSFT, Var::p(1)), var(sig, Flavor::rSFT, Var::q(2)));
  const auto ch = restrict_spec(r, Flavor::CH);
  CHECK(ch.flavor == Flavor::CH);
  CHECK(ch.image(Var::q(0)) == Element::one(Flavor::CH, 0));
  CHECK_FALSE(ch.images.contains(Var::p(0)));

  DifferentialSpec s = zero_differential(sig, Flavor::SFT);
  s.images[Var::q(0)] = var(sig, Flavor::SFT, Var::q(1)) +
                        mul(sig, var(sig, Flavor::SFT, Var::hbar()), var(sig, Flavor::SFT, Var::q(2)));
  CHECK(restrict_spec(s, Flavor::CH).image(Var::q(0)) == var(sig, Flavor::CH, Var::q(1)));
  CHECK(restrict_spec(zero_differential(sig, Flavor::SFTStar), Flavor::CH) == zero_differential(sig, Flavor::CH));
}

TEST_CASE("verify_chain_map examples") {
  const AlgebraSignature sig(2, {}, {{"a", 2, 1, {}}, {"b", 3, 1, {}}, {"c", 5, 1, {}}});
  DifferentialSpec good = zero_differential(sig, Flavor::rSFT);
  good.images[Var::q(0)] = Element::one(Flavor::rSFT, 0) -
                           mul(sig, var(sig, Flavor::rSFT, Var::q(2)), var(sig, Flavor::rSFT, Var::p(1)));
  CHECK(verify_chain_map(good, restrict_spec(good, Flavor::CH), {}).pass);

  DifferentialSpec broken = good;
  broken.images[Var::p(1)] = var(sig, Flavor::rSFT, Var::q(2));
  const Element sample = mul(sig, var(sig, Flavor::rSFT, Var::p(1)), var(sig, Flavor::rSFT, Var::q(0)));
  const auto report = verify_chain_map(broken, restrict_spec(broken, Flavor::CH), {sample});
  CHECK_FALSE(report.pass);
  bool sampleMismatch = false;
  for (const auto& m : report.mismatches) sampleMismatch |= m.label == "sample 0";
  CHECK(sampleMismatch);

  CHECK(verify_chain_map(zero_differential(sig, Flavor::SFT), zero_differential(sig, Flavor::CH), {}).pass);
}

TEST_CASE("properties on layered specs") {
  Rng rng(21);
  for (std::uint64_t seed = 100; seed < 112; ++seed) {
    const Flavor f = kAllFlavors[seed % 6];
    const auto entry = random_layered_spec(seed, {f});
    const auto& spec = entry.specs.at(f);
    CHECK(validate_structure(spec).pass());
    const auto vars = sft::testing::flavor_variables(spec.sig, f);
    std::vector<Element> samples;
    for (int i = 0; i < 10; ++i) {
      const Monomial a = sft::testing::random_monomial(rng, spec.sig, vars, 3);
      const Element b = sft::testing::random_element(rng, spec.sig, f, 2, 3);
      CHECK(apply_d(spec, mul(spec.sig, Element::monomial(f, a), b)) == leibniz_rhs(spec, a, b));
      const Element da = apply_d(spec, Element::monomial(f, a));
      if (!da.is_zero()) CHECK(homogeneous_degree(spec.sig, da) == degree(spec.sig, a) - 1);
      samples.push_back(b);
    }
    for (const auto& [target, restricted] : entry.specs)
      if (projection_defined(f, target)) CHECK(verify_chain_map(spec, restricted, samples).pass);
  }
}

TEST_CASE("projection is multiplicative") {
  const auto sig = sft::testing::mixed_signature();
  Rng rng(22);
  for (int i = 0; i < 30; ++i) {
    const Element a = sft::testing::random_element(rng, sig, Flavor::SFT, 3, 4);
    const Element b = sft::testing::random_element(rng, sig, Flavor::SFT, 3, 4);
    CHECK(project(mul_weyl(sig, a, b), Flavor::CH) == mul_super(sig, project(a, Flavor::CH), project(b, Flavor::CH)));
    const Element as = sft::testing::random_element(rng, sig, Flavor::SFTStar, 3, 4);
    const Element bs = sft::testing::random_element(rng, sig, Flavor::SFTStar, 3, 4);
    CHECK(project(mul_weyl(sig, as, bs), Flavor::CHStar) ==
          mul_super(sig, project(as, Flavor::CHStar), project(bs, Flavor::CHStar)));
  }
}
