#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cdw/error.hpp"
#include "cdw/jonsson.hpp"
#include "cdw/oracle.hpp"
#include "support.hpp"

using namespace cdw;

TEST_CASE("brute force finds the least homomorphism") {
  CHECK(!brute_force_hom(test::cycle(3), test::k2()));
  CHECK(brute_force_hom(test::cycle(4), test::k2()) == std::vector<Element>{0, 1, 0, 1});
  CHECK(brute_force_hom(test::cycle(3), test::cycle(3)) == std::vector<Element>{0, 1, 2});
  CHECK_THROWS_AS(brute_force_hom(test::cycle(6), test::k2(), 10), ResourceError);
}

TEST_CASE("free entries parametrise CD(4) tables") {
  CHECK(ordered_pair_count(3) == 6);
  CHECK(distinct_triple_count(3) == 6);
  std::mt19937_64 rng(4);
  for (int round = 0; round < 100; ++round) {
    auto n = 1 + rng() % 4;
    FreeEntries f;
    f.outer.resize(ordered_pair_count(n));
    f.inner.resize(ordered_pair_count(n));
    f.distinct.resize(3 * distinct_triple_count(n));
    for (auto* v : {&f.outer, &f.inner, &f.distinct})
      for (auto& e : *v) e = static_cast<Element>(rng() % n);
    auto alg = cd4_from_free_entries(n, f);
    CHECK(verify_cd4(alg).ok);
    CHECK(jonsson_chain_holds(alg));
  }
  CHECK_THROWS_AS(cd4_from_free_entries(2, FreeEntries{}), InputError);
}

TEST_CASE("canonical forms are relabelling invariant") {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 30; ++round) {
    auto n = 2 + rng() % 3;
    auto alg = random_cd4_algebra(n, rng);
    std::vector<Element> perm(n);
    for (Element i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    auto moved = relabel(alg, perm);
    CHECK(canonical_form(moved) == canonical_form(alg));
    CHECK(verify_cd4(moved).ok);
  }
}

TEST_CASE("enumeration of small CD(4) algebras") {
  auto one = enumerate_cd4_algebras(1);
  CHECK(one.algebras.size() == 1);
  CHECK(one.mode == "complete");
  auto two = enumerate_cd4_algebras(2);
  CHECK(two.mode == "complete");
  CHECK(!two.truncated);
  CHECK(two.candidates >= two.algebras.size());
  CHECK(two.algebras.size() == 10);
  std::set<std::vector<Element>> forms;
  for (auto const& alg : two.algebras) {
    CHECK(verify_cd4(alg).ok);
    forms.insert(canonical_form(alg));
  }
  CHECK(forms.size() == two.algebras.size());
  CHECK(forms.count(canonical_form(majority_algebra())) == 1);
  EnumerationOptions opt;
  opt.samples = 20;
  auto four = enumerate_cd4_algebras(4, opt);
  CHECK(four.mode == "sampled");
  CHECK(four.truncated);
  CHECK(four.algebras.size() <= 20);
}

TEST_CASE("subuniverses and ideals by enumeration") {
  Carrier maj(majority_algebra());
  CHECK(all_subuniverses(maj) == std::vector<ElementSet>{{0}, {0, 1}, {1}});
  // l(x,y) = maj(y,x,x) = x, so every subuniverse is an l-ideal.
  CHECK(all_ideals(maj, IdealSide::L) == std::vector<ElementSet>{{0}, {0, 1}, {1}});
  auto rels = enumerate_product_subuniverses(majority_algebra(), majority_algebra());
  // Majority preserves every binary relation on {0,1}.
  CHECK(rels.size() == 15);
  auto sub = enumerate_subdirect(majority_algebra(), majority_algebra());
  for (auto const& r : sub) CHECK(is_subdirect_binary(r, 2, 2));
  std::size_t subdirect = 0;
  for (auto const& r : rels) subdirect += is_subdirect_binary(r, 2, 2);
  CHECK(sub.size() == subdirect);
}

TEST_CASE("subdirect products are closed and subdirect") {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 15; ++round) {
    auto b1 = random_cd4_algebra(2 + rng() % 2, rng, 0.3);
    auto b2 = random_cd4_algebra(2 + rng() % 2, rng, 0.3);
    auto rels = enumerate_product_subuniverses(b1, b2);
    std::set<BinaryRelation> seen(rels.begin(), rels.end());
    CHECK(seen.size() == rels.size());
    auto prod = product_algebra(b1, b2);
    std::vector<Element> full(prod.size());
    for (Element i = 0; i < prod.size(); ++i) full[i] = i;
    for (auto const& r : rels) {
      std::vector<Element> codes;
      for (auto [x, y] : r) codes.push_back(static_cast<Element>(x * b2.size() + y));
      std::sort(codes.begin(), codes.end());
      CHECK(is_subuniverse(prod, codes));
    }
    // Count against subset enumeration of the product.
    std::size_t expected = 0;
    for (std::uint32_t m = 1; m < (1U << prod.size()); ++m) {
      std::vector<Element> s;
      for (Element i = 0; i < prod.size(); ++i)
        if ((m >> i) & 1U) s.push_back(i);
      expected += is_subuniverse(prod, s);
    }
    CHECK(rels.size() == expected);
  }
}

TEST_CASE("random instances are deterministic and Inv-closed") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    InstanceParams params;
    params.planted = seed % 2 == 0;
    auto x = random_instance(seed, params);
    auto y = random_instance(seed, params);
    CHECK(x.a == y.a);
    CHECK(x.b == y.b);
    CHECK(x.alg == y.alg);
    CHECK(preserved_by(x.alg, x.b));
    CHECK(verify_cd4(x.alg).ok);
    CHECK(x.a.vocabulary() == x.b.vocabulary());
    CHECK(x.planted.has_value() == params.planted);
    if (x.planted) CHECK(is_homomorphism(*x.planted, x.a, x.b));
  }
  CHECK_THROWS_AS(random_instance(1, InstanceParams{0, 4, 2, 3, false}), InputError);
}

TEST_CASE("lemma suite on two-element algebras") {
  LemmaSuiteOptions opt;
  opt.max_size = 2;
  auto res = lemma_suite(opt);
  CHECK(res.ok());
  CHECK(res.reports.size() == 6);
  CHECK(!res.enumeration_partial);
  CHECK(!res.budget_exhausted);
  CHECK(res.simple_ideal_free >= 1);
  for (auto const& r : res.reports) {
    CHECK(r.counterexamples.empty());
    CHECK(r.checked + r.vacuous > 0);
  }
  opt.jobs = 2;
  auto par = lemma_suite(opt);
  CHECK(par.pairs == res.pairs);
  CHECK(par.relations == res.relations);
  for (std::size_t i = 0; i < res.reports.size(); ++i)
    CHECK(par.reports[i].checked == res.reports[i].checked);
}
