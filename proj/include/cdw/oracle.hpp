#pragma once

// Ground truth independent of the strategy code: backtracking homomorphism
// search, enumeration of CD(4) algebras and subdirect products, random
// instances, and an exhaustive check of the structural lemmas on small
// algebras.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cdw/algebra.hpp"
#include "cdw/ideals.hpp"
#include "cdw/relstruct.hpp"

namespace cdw {

// Every budget knob in one place. Environment variables override defaults:
// CDW_BRUTE_FORCE_LIMIT, CDW_ENUM_BUDGET_SEC, CDW_LEMMA_BUDGET_SEC,
// CDW_SAMPLES.
struct Budgets {
  std::uint64_t brute_force_limit = 100'000'000;  // cap on |B|^|A|
  double enumeration_seconds = 60.0;
  double lemma_seconds = 540.0;
  std::size_t samples = 500;  // algebras sampled at sizes >= 4

  static Budgets from_env();
};

// Lexicographically least homomorphism A -> B by backtracking. Throws
// ResourceError if |B|^|A| exceeds the limit.
std::optional<std::vector<Element>> brute_force_hom(RelStructure const& a, RelStructure const& b,
                                                    std::uint64_t limit = Budgets{}.brute_force_limit);

// The Jonsson chain p0 = x, p1, p2, p3, p4 = z in its generic form:
// p_i(x,y,x) = x, p_i(x,x,y) = p_{i+1}(x,x,y) for even i and
// p_i(x,y,y) = p_{i+1}(x,y,y) for odd i, evaluated by brute force.
bool jonsson_chain_holds(FiniteAlgebra const& alg);

// Tables of p1, p2, p3 concatenated, minimised over all relabellings.
std::vector<Element> canonical_form(FiniteAlgebra const& alg);
// The algebra with element x renamed perm[x].
FiniteAlgebra relabel(FiniteAlgebra const& alg, std::vector<Element> const& perm);

// The entries of a CD(4) table not forced by the identities: for x != y,
// p1(x,y,y) = p2(x,y,y) and p2(x,x,y) = p3(x,x,y); and each operation on
// pairwise distinct arguments. Ordered pairs and triples are listed
// lexicographically.
struct FreeEntries {
  std::vector<Element> outer;     // p1(x,y,y) = p2(x,y,y), one per ordered pair
  std::vector<Element> inner;     // p2(x,x,y) = p3(x,x,y), one per ordered pair
  std::vector<Element> distinct;  // p1, then p2, then p3, per distinct triple
};
std::size_t ordered_pair_count(std::size_t n);
std::size_t distinct_triple_count(std::size_t n);
FiniteAlgebra cd4_from_free_entries(std::size_t n, FreeEntries const& free);

// A random CD(4) algebra: each free entry is x with probability
// projection_bias and uniform otherwise.
FiniteAlgebra random_cd4_algebra(std::size_t n, std::mt19937_64& rng, double projection_bias = 0.0);

struct EnumerationOptions {
  std::uint64_t seed = 1;
  std::size_t samples = Budgets{}.samples;
  double budget_seconds = Budgets{}.enumeration_seconds;
};

struct EnumerationResult {
  std::vector<FiniteAlgebra> algebras;  // pairwise non-isomorphic, all pass verify_cd4
  std::string mode;                     // "complete", "pattern" or "sampled"
  bool truncated = false;               // not every isomorphism type is present
  std::size_t candidates = 0;           // tables built before deduplication
};

// n <= 2: every CD(4) algebra. n = 3: every assignment of the pair entries up
// to relabelling, with the distinct-argument entries filled from the seed.
// n >= 4: seeded samples.
EnumerationResult enumerate_cd4_algebras(std::size_t n, EnumerationOptions const& options = {});

using BinaryRelation = std::vector<std::pair<Element, Element>>;

// Every subuniverse of d, sorted.
std::vector<ElementSet> all_subuniverses(Carrier const& d);
// Every side-ideal of d, sorted.
std::vector<ElementSet> all_ideals(Carrier const& d, IdealSide side);
// Every subuniverse of b1 x b2, and the subdirect ones.
std::vector<BinaryRelation> enumerate_product_subuniverses(FiniteAlgebra const& b1,
                                                           FiniteAlgebra const& b2);
std::vector<BinaryRelation> enumerate_subdirect(FiniteAlgebra const& b1, FiniteAlgebra const& b2);

struct LemmaReport {
  std::string id;
  std::string anchor;  // the statement's conclusion
  std::size_t checked = 0;
  std::size_t vacuous = 0;
  std::vector<std::string> counterexamples;
};

struct LemmaSuiteOptions {
  std::size_t max_size = 3;
  double budget_seconds = Budgets{}.lemma_seconds;
  std::size_t jobs = 1;
  std::uint64_t seed = 1;
  std::size_t samples = Budgets{}.samples;
};

struct LemmaSuiteResult {
  std::vector<LemmaReport> reports;
  std::size_t bases_total = 0;       // distinct preprocessed base algebras
  std::size_t bases_checked = 0;
  std::size_t pairs = 0;             // distinct (B1, B2) isomorphism-type pairs
  std::size_t relations = 0;         // subuniverses of B1 x B2 examined
  std::size_t simple_ideal_free = 0; // such algebras with >= 2 elements seen
  bool enumeration_partial = false;  // some base size was not enumerated completely
  bool budget_exhausted = false;     // some pairs were skipped
  double seconds = 0.0;
  bool ok() const;
};

LemmaSuiteResult lemma_suite(LemmaSuiteOptions const& options = {});

struct InstanceParams {
  std::size_t max_a = 6;
  std::size_t max_b = 4;
  std::size_t max_relations = 2;
  std::size_t max_arity = 3;
  bool planted = false;
};

struct Instance {
  RelStructure a;
  RelStructure b;
  FiniteAlgebra alg;
  std::optional<std::vector<Element>> planted;  // a homomorphism A -> B
};

// Deterministic in (seed, params). B is Inv-closed for alg.
Instance random_instance(std::uint64_t seed, InstanceParams const& params = {});

}  // namespace cdw
