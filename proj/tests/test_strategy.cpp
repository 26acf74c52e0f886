#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "cdw/error.hpp"
#include "cdw/oracle.hpp"
#include "cdw/strategy.hpp"
#include "support.hpp"

using namespace cdw;

namespace {

using Family = std::map<std::vector<Element>, std::set<Tuple>>;

Family to_family(Strategy const& h) {
  Family f;
  for (std::size_t key = 0; key < h.key_count(); ++key) {
    auto t = h.at(key).tuples();
    f[h.index_set(key)] = std::set<Tuple>(t.begin(), t.end());
  }
  return f;
}

// Every B-tuple on every index set, filtered by the partial homomorphism test.
Family naive_full(RelStructure const& a, RelStructure const& b, std::size_t k) {
  Family f;
  auto const n = a.universe(), m = b.universe();
  for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
    std::vector<Element> idx;
    for (Element i = 0; i < n; ++i)
      if ((mask >> i) & 1U) idx.push_back(i);
    if (idx.size() > k) continue;
    std::size_t total = 1;
    for (std::size_t i = 0; i < idx.size(); ++i) total *= m;
    auto& set = f[idx];
    for (std::size_t code = 0; code < total; ++code) {
      Tuple t(idx.size());
      auto rest = code;
      for (std::size_t i = idx.size(); i-- > 0;) {
        t[i] = static_cast<Element>(rest % m);
        rest /= m;
      }
      Assignment g(n);
      for (std::size_t i = 0; i < idx.size(); ++i) g[idx[i]] = t[i];
      if (is_partial_homomorphism(g, a, b)) set.insert(t);
    }
  }
  return f;
}

Tuple restrict(Tuple const& t, std::vector<Element> const& big, std::vector<Element> const& small) {
  Tuple out;
  for (std::size_t i = 0, j = 0; i < big.size(); ++i) {
    if (j < small.size() && big[i] == small[j]) {
      out.push_back(t[i]);
      ++j;
    }
  }
  return out;
}

// Naive greatest fixpoint over all pairs I subset J with |J| = |I| + 1.
std::optional<Family> naive_enforce(Family f) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [big, hb] : f) {
      if (big.size() < 2) continue;
      for (std::size_t drop = 0; drop < big.size(); ++drop) {
        auto small = big;
        small.erase(small.begin() + drop);
        auto& hs = f.at(small);
        std::set<Tuple> image;
        for (auto it = hb.begin(); it != hb.end();) {
          auto r = restrict(*it, big, small);
          if (!hs.count(r)) {
            it = hb.erase(it);
            changed = true;
          } else {
            image.insert(r);
            ++it;
          }
        }
        if (image != hs) {
          hs = image;
          changed = true;
        }
      }
    }
  }
  for (auto const& [idx, s] : f)
    if (s.empty()) return std::nullopt;
  return f;
}

}  // namespace

TEST_CASE("tuple sets code tuples in base |B|") {
  TupleSet s(2, 3);
  CHECK(s.space() == 9);
  Element t[2] = {2, 1};
  CHECK(s.encode(t) == 7);
  CHECK(s.decode(7) == Tuple{2, 1});
  s.insert(7);
  s.insert(7);
  CHECK(s.size() == 1);
  s.erase(7);
  CHECK(s.empty());
  Element bad[2] = {3, 0};
  CHECK_THROWS_AS(s.encode(bad), InputError);
}

TEST_CASE("strategy layout") {
  Strategy h(3, 4, 2);
  CHECK(h.key_count() == 4 + 6 + 4);
  CHECK(h.key_of({0, 2, 3}) < h.key_count());
  CHECK_THROWS_AS(h.key_of({2, 0}), InputError);
  CHECK_THROWS_AS(h.key_of({0, 1, 2, 3}), InputError);
  CHECK_THROWS_AS(h.key_of({5}), InputError);
  CHECK(h.covers().size() == 6 * 2 + 4 * 3);
  // 101 in base 2 without its middle digit is 11.
  CHECK(h.project(5, 3, 1) == 3);
  CHECK_THROWS_AS(Strategy(3, 65, 2), InputError);
}

TEST_CASE("choose_k") {
  CHECK(choose_k(test::k2()) == 3);
  RelStructure s(2);
  s.add("R", Relation(2, 5, {}));
  CHECK(choose_k(s) == 5);
}

TEST_CASE("init_full on a single edge") {
  auto a = test::graph(2, {{0, 1}});
  auto h = init_full(a, test::k2(), 3);
  CHECK(h.at(h.key_of({0, 1})).tuples() == std::vector<Tuple>{{0, 1}, {1, 0}});
  CHECK(h.values(0) == std::vector<Element>{0, 1});
  CHECK(h.pairs(0, 1) == std::vector<std::pair<Element, Element>>{{0, 1}, {1, 0}});

  // A directed edge into B = {(0,1)} pins the singletons after enforcement.
  RelStructure b(2);
  b.add("E", Relation(2, 2, {{0, 1}}));
  auto directed = test::graph(2, {{0, 1}}, false);
  auto e = enforce(init_full(directed, b, 3));
  REQUIRE(e);
  CHECK(singleton_coordinates(*e) == std::vector<Element>{0, 1});
  CHECK(extract_solution(*e, directed, b) == std::vector<Element>{0, 1});
}

TEST_CASE("enforce matches the naive fixpoint and ignores processing order") {
  CHECK(!enforce(init_full(test::cycle(3), test::k2(), 3)));
  std::size_t empties = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    InstanceParams params;
    params.max_a = 5;
    params.max_b = 3;
    auto inst = random_instance(seed, params);
    auto k = choose_k(inst.a);
    auto full = init_full(inst.a, inst.b, k);
    CHECK(to_family(full) == naive_full(inst.a, inst.b, k));
    auto fifo = enforce(full);
    auto shuffled = enforce(full, EnforceOptions{seed * 7919});
    auto naive = naive_enforce(to_family(full));
    REQUIRE(fifo.has_value() == naive.has_value());
    CHECK(shuffled.has_value() == fifo.has_value());
    if (!fifo) {
      ++empties;
      continue;
    }
    CHECK(to_family(*fifo) == *naive);
    CHECK(*shuffled == *fifo);
    CHECK(is_winning(*fifo, inst.a, inst.b, inst.alg));
  }
  CHECK(empties > 0);
}

TEST_CASE("winning violations are detected") {
  auto a = test::cycle(4);
  auto b = test::k2();
  auto maj = majority_algebra();
  auto h = enforce(init_full(a, b, 3));
  REQUIRE(h);
  CHECK(!winning_violation(*h, a, b, maj));
  CHECK(!is_winning(std::optional<Strategy>{}, a, b, maj));

  // Breaking forth coherence: drop one tuple of a pair set.
  auto broken = *h;
  auto key = broken.key_of({0, 1});
  broken.at(key).erase(broken.at(key).codes().front());
  CHECK(winning_violation(broken, a, b, maj));

  // A non-homomorphic tuple.
  auto bad = *h;
  bad.at(key).insert(0);  // (0,0) on an edge
  CHECK(winning_violation(bad, a, b, maj));

  // An emptied singleton.
  auto empty = *h;
  auto sk = empty.singleton_key(2);
  for (auto c : empty.at(sk).codes()) empty.at(sk).erase(c);
  CHECK(winning_violation(empty, a, b, maj));

  // One-in-three is not closed under majority until (0,0,0) is added.
  TupleSet s(3, 2);
  s.insert(s.encode(Tuple{1, 0, 0}));
  s.insert(s.encode(Tuple{0, 1, 0}));
  s.insert(s.encode(Tuple{0, 0, 1}));
  CHECK(!is_closed(s, maj));
  s.insert(0);
  CHECK(is_closed(s, maj));
}

TEST_CASE("extract_solution preconditions") {
  auto a = test::cycle(4);
  auto b = test::k2();
  auto h = enforce(init_full(a, b, 3));
  REQUIRE(h);
  CHECK_THROWS_AS(extract_solution(*h, a, b), PreconditionError);
  CHECK(singleton_coordinates(*h).empty());
}
