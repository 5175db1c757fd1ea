#include <doctest.h>

#include "oracles.hpp"
#include "sftkit/errors.hpp"
#include "sftkit/index_calculus.hpp"

using namespace sft;

TEST_CASE("generator degrees") {
  const AlgebraSignature sig(2, {}, {{"o", 3, 1, {}}}, {{"f", 2}});
  CHECK(generator_degree(sig, Var::q(0)) == 2);
  CHECK(generator_degree(sig, Var::p(0)) == -4);
  CHECK(generator_degree(sig, Var::t(0)) == 0);
  const AlgebraSignature three(3, {}, {{"o", 1, 1, {}}});
  CHECK(generator_degree(three, Var::hbar()) == 0);
  for (int n = 1; n <= 4; ++n) {
    const AlgebraSignature s(n, {}, {{"o", -3, 1, {}}, {"r", 8, 1, {}}});
    for (std::uint32_t i = 0; i < 2; ++i)
      CHECK(generator_degree(s, Var::q(i)) + generator_degree(s, Var::p(i)) == 2 * (n - 3));
  }
}

TEST_CASE("combinatorial factor") {
  const AlgebraSignature sig(2, {}, {{"a", 1, 1, {}}, {"b", 3, 3, {}}});
  CHECK(combinatorial_factor(sig, {}) == 1);
  CHECK(combinatorial_factor(sig, {{0, 1}}) == 1);
  CHECK(combinatorial_factor(sig, {{0, 2}, {1, 1}}) == 12);
  CHECK(combinatorial_factor(sig, {{0, 2}}) == 2);
  CHECK(combinatorial_factor(sig, {{1, 2}}) == 18);
}

TEST_CASE("moduli dimension examples") {
  const AlgebraSignature plane(2, {}, {{"a", 2, 1, {}}});
  PunctureProfile p{{}, {}, 0, 0, GroupElement::zero(0), 0, PunctureRole::Positive};
  CHECK(moduli_dimension(plane, p) == 0);

  const AlgebraSignature n3(3, {}, {{"a", 1, 1, {}}});
  CHECK(moduli_dimension(n3, p) == 0);

  const AlgebraSignature two(2, {}, {{"a", 2, 1, {}}, {"b", 3, 1, {}}});
  PunctureProfile neg{{}, {{1, 1}}, 0, 0, GroupElement::zero(0), 0, PunctureRole::Negative};
  CHECK(moduli_dimension(two, neg) == 0);
}

TEST_CASE("enumeration examples") {
  SUBCASE("rigid plane") {
    const AlgebraSignature sig(2, {}, {{"a", 2, 1, Rational(1)}});
    TruncationPolicy b;
    b.maxWordLength = 3;
    b.maxAction = Rational(10);
    const auto profiles = enumerate_admissible_profiles(sig, 0, PunctureRole::Positive, b);
    REQUIRE(profiles.size() == 1);
    CHECK(profiles[0].iMinus.empty());
    CHECK(profiles[0].iPlus.empty());
  }
  SUBCASE("all q even: nothing drops degree by one") {
    const AlgebraSignature sig(2, {}, {{"a", 3, 1, {}}, {"b", 5, 1, {}}, {"c", 7, 1, {}}});
    TruncationPolicy b;
    b.maxWordLength = 4;
    for (std::uint32_t i = 0; i < 3; ++i) CHECK(enumerate_admissible_profiles(sig, i, PunctureRole::Positive, b).empty());
  }
  SUBCASE("word length 0 and a non-rigid plane") {
    const AlgebraSignature sig(2, {}, {{"a", 4, 1, {}}});
    TruncationPolicy b;
    b.maxWordLength = 0;
    CHECK(enumerate_admissible_profiles(sig, 0, PunctureRole::Positive, b).empty());
  }
  SUBCASE("unbounded request") {
    const AlgebraSignature sig(2, {}, {{"a", 2, 1, Rational(1)}});
    CHECK_THROWS_AS(enumerate_admissible_profiles(sig, 0, PunctureRole::Positive, TruncationPolicy{}), UnboundedError);
    TruncationPolicy b;
    b.maxAction = Rational(3);
    b.maxPWeight = 1;
    CHECK_NOTHROW(enumerate_admissible_profiles(sig, 0, PunctureRole::Positive, b));
  }
  SUBCASE("action filter drops expensive negative ends") {
    const AlgebraSignature sig(2, {}, {{"a", 2, 1, Rational(1)}, {"z", 1, 1, Rational(5)}});
    TruncationPolicy b;
    b.maxWordLength = 1;
    auto hasZ = [&](const TruncationPolicy& bounds) {
      for (const auto& pr : enumerate_admissible_profiles(sig, 0, PunctureRole::Positive, bounds))
        if (pr.iMinus.count(1)) return true;
      return false;
    };
    CHECK(hasZ(b));
    b.maxAction = Rational(100);
    CHECK_FALSE(hasZ(b));
  }
}

TEST_CASE("degree drop check") {
  const AlgebraSignature sig(2, {}, {{"a", 2, 1, {}}, {"b", 3, 1, {}}});
  CHECK(degree_drop_check(sig, Element::one(Flavor::CH, 0), Var::q(0)));
  const AlgebraSignature even(2, {}, {{"a", 3, 1, {}}, {"b", 3, 1, {}}});
  CHECK_FALSE(degree_drop_check(even, variable(even, Flavor::CH, Var::q(1)), Var::q(0)));
  CHECK(degree_drop_check(sig, Element(Flavor::CH), Var::q(0)));
}

TEST_CASE("property: dimension zero iff the term drops degree by one") {
  const AlgebraSignature sig(3, {2}, {{"a", 1, 1, {}}, {"b", 2, 2, {}}, {"c", -1, 1, {}}}, {{"u", 1}, {"w", 3}});
  sft::testing::Rng rng(5);
  int rigid = 0;
  for (int i = 0; i < 3000; ++i) {
    PunctureProfile p;
    for (std::uint32_t o = 0; o < 3; ++o) {
      if (auto e = rng.pick(0, 2)) p.iMinus[o] = static_cast<std::uint32_t>(e);
      if (auto e = rng.pick(0, 2)) p.iPlus[o] = static_cast<std::uint32_t>(e);
    }
    p.genus = static_cast<std::uint32_t>(rng.pick(0, 2));
    p.markedPoints = static_cast<std::uint32_t>(rng.pick(0, 2));
    std::vector<std::uint32_t> forms;
    for (std::uint32_t k = 0; k < p.markedPoints; ++k) forms.push_back(static_cast<std::uint32_t>(rng.pick(0, 1)));
    p.group = GroupElement({rng.pick(-2, 2)});
    p.extraOrbit = static_cast<std::uint32_t>(rng.pick(0, 2));
    p.extraRole = rng.pick(0, 1) ? PunctureRole::Positive : PunctureRole::Negative;
    const bool rigidDim = cut_down_dimension(sig, p, forms) == 0;
    const bool drops = profile_term_degree(sig, p, forms) == sig.degree(profile_generator(p)) - 1;
    CHECK(rigidDim == drops);
    rigid += rigidDim;
  }
  CHECK(rigid > 0);
}
