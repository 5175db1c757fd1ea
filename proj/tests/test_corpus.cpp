#include <doctest.h>

#include "sftkit/corpus.hpp"
#include "sftkit/errors.hpp"
#include "sftkit/index_calculus.hpp"
#include "sftkit/io.hpp"

using namespace sft;

TEST_CASE("toy_overtwisted") {
  const auto entry = toy_overtwisted();
  CHECK(entry.expected == ExpectedVerdict::Vanishes);
  CHECK(entry.sig.n() == 2);
  CHECK(entry.sig.degree(Var::q(0)) == 1);
  CHECK(entry.specs.size() == 6);
  CHECK(entry.specs.at(Flavor::CH).image(Var::q(0)) == Element::one(Flavor::CH, 0));
  const PunctureProfile plane{{}, {}, 0, 0, GroupElement::zero(0), 0, PunctureRole::Positive};
  CHECK(moduli_dimension(entry.sig, plane) == 0);
  for (const auto& [f, s] : entry.specs) CHECK(check_d_squared(s).pass);
}

TEST_CASE("toy_tight") {
  const auto entry = toy_tight(4);
  CHECK(entry.expected == ExpectedVerdict::PersistsWithinBounds);
  for (std::uint32_t i = 0; i < 4; ++i) {
    CHECK(entry.sig.orbit(i).cz == static_cast<int>(2 * i + 3));
    CHECK_FALSE(entry.sig.is_odd(Var::q(i)));
    CHECK_FALSE(entry.sig.is_odd(Var::p(i)));
  }
  for (const auto& [f, s] : entry.specs) {
    CHECK(check_d_squared(s).pass);
    CHECK_FALSE(find_unit_primitive(s, entry.bounds).certificate);
  }
  CHECK_THROWS_AS(toy_tight(0), SemanticError);
}

TEST_CASE("random layered specs") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Flavor f = kAllFlavors[seed % 6];
    const auto a = random_layered_spec(seed, {f});
    const auto b = random_layered_spec(seed, {f});
    CHECK(a.sig == b.sig);
    CHECK(a.specs == b.specs);
    CHECK(io::emit_differential(a.specs.at(f), "x") == io::emit_differential(b.specs.at(f), "x"));
    const auto& spec = a.specs.at(f);
    CHECK(validate_structure(spec).pass());
    CHECK(check_d_squared(spec).pass);
    for (const auto& [target, restricted] : a.specs)
      if (target != f) CHECK(verify_chain_map(spec, restricted, {}).pass);
    const auto r = classify(a.specs, a.bounds, a.policy);
    CHECK((r.verdict == Verdict::Vanishes) == (a.expected == ExpectedVerdict::Vanishes));
  }
  CHECK_FALSE(random_layered_spec(1).specs == random_layered_spec(2).specs);
}

TEST_CASE("named entries reproduce their verdicts") {
  for (const auto& name : corpus_names()) {
    const auto entry = corpus_entry(name);
    const auto r = classify(entry.specs, entry.bounds, entry.policy);
    CHECK((r.verdict == Verdict::Vanishes) == (entry.expected == ExpectedVerdict::Vanishes));
  }
  CHECK_THROWS_AS(corpus_entry("nope"), SemanticError);
}
