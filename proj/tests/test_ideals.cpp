#include <doctest.h>

#include <algorithm>
#include <random>

#include "cdw/error.hpp"
#include "cdw/ideals.hpp"
#include "cdw/oracle.hpp"

using namespace cdw;

namespace {

// Side operation evaluated on tuples, independent of the Carrier tables.
Tuple side_tuple(FiniteAlgebra const& alg, IdealSide side, Tuple const& x, Tuple const& y) {
  return side == IdealSide::L ? alg.apply(Op::p2, y, x, x) : alg.apply(Op::p2, x, x, y);
}

struct Brute {
  Carrier const& d;
  std::vector<Tuple> const& el;

  bool has(unsigned mask, Tuple const& t) const {
    auto it = std::lower_bound(el.begin(), el.end(), t);
    return it != el.end() && *it == t && ((mask >> (it - el.begin())) & 1U);
  }
  bool subuniverse(unsigned mask) const {
    auto const& alg = d.algebra();
    for (std::size_t i = 0; i < el.size(); ++i)
      for (std::size_t j = 0; j < el.size(); ++j)
        for (std::size_t k = 0; k < el.size(); ++k) {
          if (!((mask >> i) & (mask >> j) & (mask >> k) & 1U)) continue;
          for (auto op : kOps)
            if (!has(mask, alg.apply(op, el[i], el[j], el[k]))) return false;
        }
    return true;
  }
  bool ideal(unsigned mask, IdealSide side) const {
    if (mask == 0 || !subuniverse(mask)) return false;
    for (std::size_t i = 0; i < el.size(); ++i) {
      if (!((mask >> i) & 1U)) continue;
      for (auto const& y : el)
        if (!has(mask, side_tuple(d.algebra(), side, el[i], y))) return false;
    }
    return true;
  }
  std::vector<unsigned> ideals(IdealSide side) const {
    std::vector<unsigned> out;
    for (unsigned m = 1; m < (1U << el.size()); ++m)
      if (ideal(m, side)) out.push_back(m);
    return out;
  }
  unsigned closure(unsigned seed, IdealSide side) const {
    unsigned best = (1U << el.size()) - 1;
    for (auto m : ideals(side))
      if ((m & seed) == seed && __builtin_popcount(m) < __builtin_popcount(best)) best = m;
    return best;
  }
};

unsigned mask_of(ElementSet const& s) {
  unsigned m = 0;
  for (auto i : s) m |= 1U << i;
  return m;
}

ElementSet set_of(unsigned m, std::size_t n) {
  ElementSet s;
  for (std::size_t i = 0; i < n; ++i)
    if ((m >> i) & 1U) s.push_back(i);
  return s;
}

std::vector<Carrier> sample_carriers(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<Carrier> out;
  while (static_cast<int>(out.size()) < count) {
    auto n = 2 + rng() % 3;
    auto alg = random_cd4_algebra(n, rng, 0.4);
    if (rng() % 2 == 0) {
      out.emplace_back(alg);
      continue;
    }
    std::vector<Tuple> seedset(2 + rng() % 2, Tuple(2));
    for (auto& t : seedset)
      for (auto& v : t) v = static_cast<Element>(rng() % n);
    auto elems = sg_closure(alg, 2, seedset);
    if (elems.size() <= 10) out.emplace_back(alg, 2, elems);
  }
  return out;
}

}  // namespace

TEST_CASE("carriers reject non-closed element lists") {
  auto maj = majority_algebra();
  CHECK_THROWS_AS(Carrier(maj, 3, {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}}), InputError);
  Carrier c(maj, 2, sg_closure(maj, 2, {{0, 1}, {1, 0}}));
  CHECK(c.size() == 2);
  CHECK(c.index_of({1, 0}) == 1);
  CHECK(!c.index_of({2, 2}));
}

TEST_CASE("ideal predicates and closures agree with subset enumeration") {
  for (auto const& d : sample_carriers(21, 60)) {
    Brute b{d, d.elements()};
    auto const n = d.size();
    for (auto side : kSides) {
      auto ideals = b.ideals(side);
      for (unsigned m = 1; m < (1U << n); ++m) {
        auto s = set_of(m, n);
        CHECK(is_subuniverse(d, s) == b.subuniverse(m));
        CHECK(is_ideal(d, s, side) == b.ideal(m, side));
        CHECK(mask_of(ideal_closure(d, s, side)) == b.closure(m, side));
      }
      // Minimal ideals and their union.
      std::vector<unsigned> minimal;
      for (auto m : ideals) {
        bool min = std::none_of(ideals.begin(), ideals.end(),
                                [&](unsigned o) { return o != m && (o & m) == o; });
        if (min) minimal.push_back(m);
      }
      unsigned uni = 0;
      for (auto m : minimal) uni |= m;
      auto flags = minimal_ideal_generators(d, side);
      for (std::size_t a = 0; a < n; ++a) {
        CHECK(flags[a] == static_cast<bool>((uni >> a) & 1U));
        CHECK(generates_minimal_ideal(d, a, side) == flags[a]);
      }
    }
    bool free = b.ideals(IdealSide::L).size() == 1 && b.ideals(IdealSide::R).size() == 1;
    CHECK(is_ideal_free(d) == free);
    auto proper = find_proper_ideal(d);
    CHECK(proper.has_value() == !free);
    if (proper) {
      CHECK(is_ideal(d, proper->elements, proper->side));
      CHECK(proper->elements.size() < n);
      CHECK(proper->elements == ideal_closure(d, {proper->generator}, proper->side));
      auto pm = mask_of(proper->elements);
      for (auto side : kSides)
        for (std::size_t a = 0; a < n; ++a) {
          auto other = mask_of(ideal_closure(d, {a}, side));
          CHECK(!(other != pm && (other & pm) == other && other != (1U << n) - 1));
        }
    }
  }
}

TEST_CASE("sg_closure on carriers is the least subuniverse") {
  for (auto const& d : sample_carriers(33, 30)) {
    Brute b{d, d.elements()};
    auto const n = d.size();
    for (unsigned seed = 1; seed < (1U << n); seed += 3) {
      unsigned best = (1U << n) - 1;
      for (unsigned m = 1; m < (1U << n); ++m)
        if ((m & seed) == seed && b.subuniverse(m) && __builtin_popcount(m) < __builtin_popcount(best))
          best = m;
      CHECK(mask_of(sg_closure(d, set_of(seed, n))) == best);
    }
  }
}

TEST_CASE("absorption witnesses for non-ideal subuniverses") {
  std::size_t witnessed = 0;
  for (auto const& d : sample_carriers(45, 40)) {
    Brute b{d, d.elements()};
    auto const n = d.size();
    for (unsigned m = 1; m < (1U << n); ++m) {
      if (!b.subuniverse(m)) {
        CHECK_THROWS_AS(absorption_witness(d, set_of(m, n), IdealSide::L), PreconditionError);
        continue;
      }
      for (auto side : kSides) {
        auto s = set_of(m, n);
        if (b.ideal(m, side)) {
          CHECK_THROWS_AS(absorption_witness(d, s, side), PreconditionError);
          continue;
        }
        bool exists = false;
        for (std::size_t x = 0; x < n; ++x)
          for (std::size_t y = 0; y < n; ++y)
            if (((m >> x) & 1U) && !((m >> y) & 1U) && d.side_op(side, x, y) == y) exists = true;
        auto w = absorption_witness(d, s, side);
        CHECK(w.has_value() == exists);
        if (w) {
          ++witnessed;
          CHECK(((m >> w->first) & 1U));
          CHECK(!((m >> w->second) & 1U));
          CHECK(d.side_op(side, w->first, w->second) == w->second);
        }
      }
    }
  }
  CHECK(witnessed > 0);
}

TEST_CASE("majority singletons are l-ideals") {
  Carrier d(majority_algebra());
  CHECK(!is_ideal_free(d));
  auto p = find_proper_ideal(d);
  REQUIRE(p);
  CHECK(p->elements == ElementSet{0});
  CHECK(p->side == IdealSide::L);
  CHECK(is_ideal_free(Carrier(trivial_algebra())));
  CHECK_THROWS_AS(is_ideal(d, {}, IdealSide::L), InputError);
  CHECK_THROWS_AS(is_ideal(d, {5}, IdealSide::L), InputError);
}
