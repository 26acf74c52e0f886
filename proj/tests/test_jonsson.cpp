#include <doctest.h>

#include <random>
#include <set>

#include "cdw/error.hpp"
#include "cdw/jonsson.hpp"
#include "cdw/oracle.hpp"

using namespace cdw;

namespace {

// Idempotent ternary table on {0,1} from 6 free bits (the non-constant triples).
OperationTable table_from_bits(unsigned bits) {
  std::vector<Element> t(8);
  int k = 0;
  for (unsigned c = 0; c < 8; ++c) {
    if (c == 0 || c == 7) {
      t[c] = c == 7;
    } else {
      t[c] = (bits >> k++) & 1U;
    }
  }
  return OperationTable(3, 2, t);
}

}  // namespace

TEST_CASE("majority is a CD(4) algebra; projections are not") {
  CHECK(verify_cd4(majority_algebra()).ok);
  auto proj = FiniteAlgebra::uniform(2, [](Element x, Element, Element) { return x; });
  auto report = verify_cd4(proj);
  CHECK(!report.ok);
  bool found = false;
  for (auto const& f : report.failures) found = found || f.identity == "p3(x,y,y)=y";
  CHECK(found);
  CHECK_THROWS_AS(certify_cd4(proj), PreconditionError);
  CHECK(certify_cd4(majority_algebra()).verified());
  CHECK(!majority_algebra().verified());
}

TEST_CASE("verify_cd4 agrees with the generic chain on every two-element algebra") {
  // 2^18 triples of idempotent tables; the generic chain check is the oracle.
  std::set<std::vector<Element>> types;
  std::size_t passing = 0;
  for (unsigned a = 0; a < 64; ++a) {
    auto p1 = table_from_bits(a);
    for (unsigned b = 0; b < 64; ++b) {
      auto p2 = table_from_bits(b);
      for (unsigned c = 0; c < 64; ++c) {
        FiniteAlgebra alg(p1, p2, table_from_bits(c));
        bool fast = verify_cd4(alg).ok;
        REQUIRE(fast == jonsson_chain_holds(alg));
        if (fast) {
          ++passing;
          types.insert(canonical_form(alg));
        }
      }
    }
  }
  // Four free entries: p1(x,y,y) and p2(x,x,y) for (x,y) = (0,1), (1,0).
  CHECK(passing == 16);
  CHECK(types.size() == enumerate_cd4_algebras(2).algebras.size());
}

TEST_CASE("derived operations of majority") {
  auto l = derived_l(majority_algebra());
  auto r = derived_r(majority_algebra());
  for (Element x = 0; x < 2; ++x) {
    for (Element y = 0; y < 2; ++y) {
      CHECK(l.at(x, y) == x);  // p2(y,x,x) = x
      CHECK(r.at(x, y) == x);  // p2(x,x,y) = x
    }
  }
  CHECK(verify_lr_idempotence(majority_algebra()).ok);
}

TEST_CASE("retraction exponents") {
  CHECK(retraction_exponent({0, 1, 2}) == 1);
  CHECK(retraction_exponent({1, 2, 0}) == 3);    // 3-cycle: f^e = id needs 3 | e
  CHECK(retraction_exponent({1, 0, 2}) == 2);    // transposition
  CHECK(retraction_exponent({1, 2, 2}) == 2);    // tail of length 2 into a fixed point
  CHECK(retraction_exponent({1, 2, 3, 2}) == 2);  // tail of 2 into a 2-cycle
}

TEST_CASE("reduced exponents evaluate like exact powers") {
  ReducedExponent e(3, 100);
  CHECK(e.exact() == 100u);
  CHECK(e.effective() == 3 + (100 - 3) % 6);
  std::mt19937_64 rng(3);
  for (int round = 0; round < 200; ++round) {
    auto n = 1 + rng() % 5;
    UnaryMap f(n);
    for (auto& v : f) v = static_cast<Element>(rng() % n);
    std::uint64_t exact = 1;
    ReducedExponent red(n);
    for (int i = 0; i < 3; ++i) {
      auto factor = 1 + rng() % 7;
      exact *= factor;
      red *= factor;
    }
    CHECK(map_power(f, red) == map_power(f, exact));
    CHECK(map_power(f, red.predecessor()) == map_power(f, exact - 1));
  }
  // Overflowing products keep the residue.
  ReducedExponent big(4);
  for (int i = 0; i < 70; ++i) big *= 2;
  CHECK(!big.exact());
  UnaryMap cyc{1, 2, 3, 0};
  CHECK(map_power(cyc, big) == map_power(cyc, 0));  // 2^70 is divisible by 4
  CHECK_THROWS_AS(ReducedExponent(3, 0).predecessor(), PreconditionError);
}

TEST_CASE("preprocessed terms match the explicit iterates") {
  std::mt19937_64 rng(17);
  std::size_t nontrivial = 0;
  for (int round = 0; round < 200; ++round) {
    auto n = 2 + rng() % 3;
    auto alg = random_cd4_algebra(n, rng, 0.2);
    auto pre = preprocess_terms(alg);
    CHECK(verify_cd4(pre.algebra).ok);
    CHECK(verify_lr_idempotence(pre.algebra).ok);
    REQUIRE(pre.n1);
    REQUIRE(pre.n3);
    if (*pre.n1 > 64 || *pre.n3 > 64) continue;
    if (*pre.n1 > 1 || *pre.n3 > 1) ++nontrivial;
    auto q1 = q1_term(*pre.n1), q3 = q3_term(*pre.n3);
    auto q1m = q1_term(*pre.n1 - 1), q3m = q3_term(*pre.n3 - 1);
    for (Element x = 0; x < n; ++x) {
      for (Element y = 0; y < n; ++y) {
        for (Element z = 0; z < n; ++z) {
          Element args[3] = {x, y, z};
          CHECK(pre.algebra.apply(Op::p1, x, y, z) == eval_term(q1, alg, args));
          CHECK(pre.algebra.apply(Op::p3, x, y, z) == eval_term(q3, alg, args));
          auto left = eval_term(q1m, alg, args), right = eval_term(q3m, alg, args);
          CHECK(pre.algebra.apply(Op::p2, x, y, z) == alg.apply(Op::p2, left, y, right));
        }
      }
    }
  }
  CHECK(nontrivial > 0);
}

TEST_CASE("preprocessing rejects algebras outside CD(4)") {
  auto proj = FiniteAlgebra::uniform(2, [](Element x, Element, Element) { return x; });
  CHECK_THROWS_AS(preprocess_terms(proj), PreconditionError);
}
