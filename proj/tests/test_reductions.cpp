#include <doctest.h>

#include <random>

#include "cdw/error.hpp"
#include "cdw/oracle.hpp"
#include "cdw/reductions.hpp"
#include "support.hpp"

using namespace cdw;

namespace {

// The first active coordinate of an enforced strategy with a proper ideal.
struct IdealSite {
  Element a;
  ProperIdeal ideal;
  std::vector<Element> values;
};

std::optional<IdealSite> ideal_site(Strategy const& h, FiniteAlgebra const& alg) {
  for (Element a = 0; a < h.a_size(); ++a) {
    if (h.values(a).size() < 2) continue;
    auto carrier = value_carrier(h, a, alg);
    auto found = find_proper_ideal(carrier);
    if (!found) continue;
    std::vector<Element> x;
    for (auto i : found->elements) x.push_back(carrier.element(i)[0]);
    return IdealSite{a, *found, x};
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("canonical coatoms") {
  CHECK(!canonical_coatom(trivial_algebra()));
  auto c = canonical_coatom(majority_algebra());
  REQUIRE(c);
  CHECK(c->is_identity());
  auto square = product_algebra(majority_algebra(), majority_algebra());
  auto sq = canonical_coatom(square);
  REQUIRE(sq);
  CHECK(sq->block_count() == 2);
}

TEST_CASE("ideal_reduce keeps exactly the functions that land in X") {
  std::size_t reduced = 0;
  for (std::uint64_t seed = 1; seed <= 80 && reduced < 15; ++seed) {
    auto inst = random_instance(seed);
    auto alg = preprocess_terms(inst.alg).algebra;
    auto h = enforce(init_full(inst.a, inst.b, choose_k(inst.a)));
    if (!h) continue;
    auto site = ideal_site(*h, alg);
    if (!site) continue;
    auto out = ideal_reduce(*h, site->a, site->values, site->ideal.side, inst.a, inst.b, alg);
    ++reduced;
    CHECK(out.values(site->a) == site->values);
    CHECK(out.potential() < h->potential());
    for (std::size_t key = 0; key < h->key_count(); ++key) {
      auto const& idx = h->index_set(key);
      auto pos = std::find(idx.begin(), idx.end(), site->a);
      if (pos == idx.end()) continue;
      std::vector<Tuple> expected;
      for (auto const& t : h->at(key).tuples())
        if (std::binary_search(site->values.begin(), site->values.end(), t[pos - idx.begin()]))
          expected.push_back(t);
      CHECK(out.at(key).tuples() == expected);
    }
    // X = H_a is not proper; a non-ideal subset is rejected.
    CHECK_THROWS_AS(ideal_reduce(*h, site->a, h->values(site->a), site->ideal.side, inst.a, inst.b,
                                 alg),
                    PreconditionError);
    CHECK_THROWS_AS(ideal_reduce(*h, site->a, {}, site->ideal.side, inst.a, inst.b, alg),
                    PreconditionError);
  }
  CHECK(reduced > 0);
}

TEST_CASE("ideal_reduce on the even cycle") {
  auto a = test::cycle(4);
  auto b = test::k2();
  auto maj = majority_algebra();
  auto h = enforce(init_full(a, b, 3));
  REQUIRE(h);
  auto out = ideal_reduce(*h, 1, {0}, IdealSide::L, a, b, maj);
  CHECK(out.values(0) == std::vector<Element>{1});
  CHECK(out.values(1) == std::vector<Element>{0});
  CHECK(out.potential() == 4);
  CHECK_THROWS_AS(ideal_reduce(*h, 1, {2}, IdealSide::L, a, b, maj), PreconditionError);
  CHECK_THROWS_AS(ideal_reduce(*h, 9, {0}, IdealSide::L, a, b, maj), InputError);
}

TEST_CASE("platoons on the even cycle") {
  auto a = test::cycle(4);
  auto b = test::k2();
  auto maj = majority_algebra();
  auto h = enforce(init_full(a, b, 3));
  REQUIRE(h);
  auto p = find_platoon(*h, maj);
  // Every vertex is linked to vertex 0 by a bijection of values.
  CHECK(p.members == std::vector<Element>{0, 1, 2, 3});
  CHECK(!platoon_violation(*h, p));
  CHECK(p.bijection(0, 1) == std::vector<std::uint32_t>{1, 0});
  CHECK(p.bijection(0, 2) == std::vector<std::uint32_t>{0, 1});
  auto r = simple_reduce(*h, p, a, b, maj);
  CHECK(r.strategy.potential() == 4);
  CHECK(extract_solution(r.strategy, a, b) == std::vector<Element>{0, 1, 0, 1});

  auto broken = p;
  broken.tau[{0, 1}] = {0, 1};
  CHECK(platoon_violation(*h, broken));
}

TEST_CASE("platoons exclude unlinked coordinates") {
  // Two disjoint edges: the second edge has no constraint to the first.
  auto a = test::graph(4, {{0, 1}, {2, 3}});
  auto b = test::k2();
  auto maj = majority_algebra();
  auto h = enforce(init_full(a, b, 3));
  REQUIRE(h);
  auto p = find_platoon(*h, maj);
  CHECK(p.members == std::vector<Element>{0, 1});
  auto r = simple_reduce(*h, p, a, b, maj);
  CHECK(r.strategy.values(0).size() == 1);
  CHECK(r.strategy.values(2).size() == 2);
}

TEST_CASE("solve on small graphs") {
  auto maj = majority_algebra();
  auto res = solve(test::cycle(4), test::k2(), maj);
  REQUIRE(res.homomorphism);
  CHECK(is_homomorphism(*res.homomorphism, test::cycle(4), test::k2()));
  CHECK(res.trace.steps.front().kind == "enforce");
  auto none = solve(test::cycle(5), test::k2(), maj);
  CHECK(!none.homomorphism);
  CHECK(none.trace.steps.back().potential == 0);

  RelStructure other(2);
  other.add("F", Relation(2, 2, {{0, 1}}));
  CHECK_THROWS_AS(solve(test::cycle(4), other, maj), InputError);
  CHECK_THROWS_AS(solve(test::cycle(4), test::k2(), majority_algebra(3)), InputError);
  auto proj = FiniteAlgebra::uniform(2, [](Element x, Element, Element) { return x; });
  CHECK_THROWS_AS(solve(test::cycle(4), test::k2(), proj), PreconditionError);
  RelStructure one(2);
  one.add("E", Relation(2, 3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  RelStructure inst(3);
  inst.add("E", Relation(3, 3, {{0, 1, 2}}));
  CHECK_THROWS_AS(solve(inst, one, maj), PreconditionError);
}

TEST_CASE("solve agrees with brute force and shrinks the potential") {
  for (std::uint64_t seed = 100; seed < 160; ++seed) {
    InstanceParams params;
    params.planted = seed % 3 == 0;
    auto inst = random_instance(seed, params);
    auto res = solve(inst.a, inst.b, inst.alg);
    auto truth = brute_force_hom(inst.a, inst.b);
    REQUIRE(res.homomorphism.has_value() == truth.has_value());
    if (params.planted) CHECK(res.homomorphism.has_value());
    if (res.homomorphism) CHECK(is_homomorphism(*res.homomorphism, inst.a, inst.b));
    for (std::size_t i = 1; i < res.trace.steps.size(); ++i)
      CHECK(res.trace.steps[i].potential < res.trace.steps[i - 1].potential);
  }
}

TEST_CASE("ideal_reduce without constraints keeps every other value") {
  RelStructure a(3), b(2);
  a.add("E", Relation(3, 2, {}));
  b.add("E", Relation(2, 2, {{0, 1}, {1, 0}}));
  auto maj = majority_algebra();
  auto h = enforce(init_full(a, b, 3));
  REQUIRE(h);
  auto out = ideal_reduce(*h, 1, {0}, IdealSide::L, a, b, maj);
  CHECK(out.values(0) == std::vector<Element>{0, 1});
  CHECK(out.values(1) == std::vector<Element>{0});
  CHECK(out.values(2) == std::vector<Element>{0, 1});
  for (std::size_t key = 0; key < h->key_count(); ++key) CHECK(out.at(key).subset_of(h->at(key)));
}

TEST_CASE("platoon of a full product is a single coordinate") {
  RelStructure a(2), b(2);
  a.add("E", Relation(2, 2, {}));
  b.add("E", Relation(2, 2, {{0, 1}, {1, 0}}));
  auto maj = majority_algebra();
  auto h = enforce(init_full(a, b, 3));
  REQUIRE(h);
  auto p = find_platoon(*h, maj);
  CHECK(p.members == std::vector<Element>{0});
  CHECK(p.theta.at(0).is_identity());
  auto r = simple_reduce(*h, p, a, b, maj);
  CHECK(r.classes.at(0) == std::vector<Element>{0});
  CHECK(r.strategy.values(0) == std::vector<Element>{0});
}

TEST_CASE("solve maps a structure to itself") {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    auto inst = random_instance(seed);
    auto res = solve(inst.b, inst.b, inst.alg);
    REQUIRE(res.homomorphism);
    CHECK(is_homomorphism(*res.homomorphism, inst.b, inst.b));
  }
}
