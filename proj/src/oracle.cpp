#include "cdw/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "cdw/error.hpp"
#include "cdw/jonsson.hpp"

namespace cdw {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename T>
void override_from_env(char const* name, T& value) {
  char const* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return;
  std::istringstream in(raw);
  T parsed{};
  if (!(in >> parsed) || parsed < T{}) throw InputError(std::string("bad value for ") + name);
  value = parsed;
}

std::size_t pair_index(std::size_t n, Element x, Element y) {
  return x * (n - 1) + (y < x ? y : y - 1);
}

std::vector<std::int64_t> triple_index(std::size_t n) {
  std::vector<std::int64_t> index(n * n * n, -1);
  std::int64_t next = 0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        if (x != y && y != z && x != z) index[(x * n + y) * n + z] = next++;
      }
    }
  }
  return index;
}

std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

bool chance(std::mt19937_64& rng, double p) {
  return static_cast<double>(rng() % 1'000'000) < p * 1'000'000.0;
}

}  // namespace

Budgets Budgets::from_env() {
  Budgets b;
  override_from_env("CDW_BRUTE_FORCE_LIMIT", b.brute_force_limit);
  override_from_env("CDW_ENUM_BUDGET_SEC", b.enumeration_seconds);
  override_from_env("CDW_LEMMA_BUDGET_SEC", b.lemma_seconds);
  override_from_env("CDW_SAMPLES", b.samples);
  return b;
}

// ---------------------------------------------------------------------------
// Homomorphism search
// ---------------------------------------------------------------------------

std::optional<std::vector<Element>> brute_force_hom(RelStructure const& a, RelStructure const& b,
                                                    std::uint64_t limit) {
  require_same_vocabulary(a, b);
  auto const n = a.universe();
  auto const m = b.universe();
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (m != 0 && space > limit / m) throw ResourceError("search space exceeds the budget");
    space *= m;
  }
  if (space > limit) throw ResourceError("search space exceeds the budget");
  if (n == 0) return std::vector<Element>{};
  if (m == 0) return std::nullopt;

  // Constraints are checked once their last variable is assigned.
  struct Check {
    Relation const* target;
    Tuple const* vars;
  };
  std::vector<std::vector<Check>> by_last(n);
  for (auto const& [name, rel] : a.relations()) {
    for (auto const& t : rel.tuples()) {
      by_last[*std::max_element(t.begin(), t.end())].push_back({&b.relation(name), &t});
    }
  }
  std::vector<Element> h(n, 0);
  std::vector<bool> started(n, false);
  Tuple image;
  std::size_t i = 0;
  while (true) {
    if (!started[i]) {
      started[i] = true;
      h[i] = 0;
    } else if (++h[i] == m) {
      started[i] = false;
      if (i == 0) return std::nullopt;
      --i;
      continue;
    }
    bool ok = true;
    for (auto const& c : by_last[i]) {
      image.resize(c.vars->size());
      for (std::size_t j = 0; j < image.size(); ++j) image[j] = h[(*c.vars)[j]];
      if (!c.target->contains(image)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (i + 1 == n) return h;
    ++i;
  }
}

bool jonsson_chain_holds(FiniteAlgebra const& alg) {
  auto const n = static_cast<Element>(alg.size());
  auto p = [&](int i, Element x, Element y, Element z) -> Element {
    if (i == 0) return x;
    if (i == 4) return z;
    std::array<Element, 3> args{x, y, z};
    return alg.op(kOps[static_cast<std::size_t>(i - 1)])(args);
  };
  for (Element x = 0; x < n; ++x) {
    for (Element y = 0; y < n; ++y) {
      for (int i = 0; i <= 4; ++i) {
        if (p(i, x, y, x) != x) return false;
      }
      for (int i = 0; i < 4; ++i) {
        bool ok = i % 2 == 0 ? p(i, x, x, y) == p(i + 1, x, x, y)
                             : p(i, x, y, y) == p(i + 1, x, y, y);
        if (!ok) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Algebra enumeration
// ---------------------------------------------------------------------------

FiniteAlgebra relabel(FiniteAlgebra const& alg, std::vector<Element> const& perm) {
  auto const n = alg.size();
  if (perm.size() != n) throw InputError("permutation size differs from the algebra");
  std::vector<Element> inverse(n, static_cast<Element>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (perm[i] >= n || inverse[perm[i]] != n) throw InputError("not a permutation");
    inverse[perm[i]] = static_cast<Element>(i);
  }
  std::array<OperationTable, 3> tables;
  for (auto op : kOps) {
    tables[static_cast<std::size_t>(op)] =
        OperationTable::from_function(3, n, [&](std::span<Element const> a) {
          return perm[alg.apply(op, inverse[a[0]], inverse[a[1]], inverse[a[2]])];
        });
  }
  return FiniteAlgebra(tables[0], tables[1], tables[2]);
}

std::vector<Element> canonical_form(FiniteAlgebra const& alg) {
  auto const n = alg.size();
  std::vector<Element> perm(n), inverse(n);
  std::iota(perm.begin(), perm.end(), Element{0});
  std::vector<Element> best, current(3 * n * n * n);
  do {
    for (std::size_t i = 0; i < n; ++i) inverse[perm[i]] = static_cast<Element>(i);
    std::size_t pos = 0;
    for (auto op : kOps) {
      for (Element x = 0; x < n; ++x) {
        for (Element y = 0; y < n; ++y) {
          for (Element z = 0; z < n; ++z) {
            current[pos++] = perm[alg.apply(op, inverse[x], inverse[y], inverse[z])];
          }
        }
      }
    }
    if (best.empty() || current < best) best = current;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::size_t ordered_pair_count(std::size_t n) { return n * (n - 1); }

std::size_t distinct_triple_count(std::size_t n) {
  return n < 3 ? 0 : n * (n - 1) * (n - 2);
}

FiniteAlgebra cd4_from_free_entries(std::size_t n, FreeEntries const& free) {
  if (n == 0) throw InputError("algebras must be nonempty");
  auto const pairs = ordered_pair_count(n);
  auto const triples = distinct_triple_count(n);
  if (free.outer.size() != pairs || free.inner.size() != pairs ||
      free.distinct.size() != 3 * triples) {
    throw InputError("wrong number of free entries");
  }
  auto const tri = triple_index(n);
  auto build = [&](std::size_t which) {
    return OperationTable::from_function(3, n, [&](std::span<Element const> a) -> Element {
      auto const x = a[0], y = a[1], z = a[2];
      if (x == z) return x;
      if (x == y) return which == 0 ? x : free.inner[pair_index(n, x, z)];
      if (y == z) return which == 2 ? y : free.outer[pair_index(n, x, y)];
      return free.distinct[which * triples +
                           static_cast<std::size_t>(tri[(x * n + y) * n + z])];
    });
  };
  return FiniteAlgebra(build(0), build(1), build(2));
}

FiniteAlgebra random_cd4_algebra(std::size_t n, std::mt19937_64& rng, double projection_bias) {
  if (n == 0) throw InputError("algebras must be nonempty");
  FreeEntries free;
  auto pick = [&](Element x) {
    return chance(rng, projection_bias) ? x : static_cast<Element>(draw(rng, n));
  };
  for (Element x = 0; x < n; ++x) {
    for (Element y = 0; y < n; ++y) {
      if (x != y) free.outer.push_back(pick(x));
    }
  }
  for (Element x = 0; x < n; ++x) {
    for (Element y = 0; y < n; ++y) {
      if (x != y) free.inner.push_back(pick(x));
    }
  }
  for (int which = 0; which < 3; ++which) {
    for (Element x = 0; x < n; ++x) {
      for (Element y = 0; y < n; ++y) {
        for (Element z = 0; z < n; ++z) {
          if (x != y && y != z && x != z) free.distinct.push_back(pick(x));
        }
      }
    }
  }
  return cd4_from_free_entries(n, free);
}

EnumerationResult enumerate_cd4_algebras(std::size_t n, EnumerationOptions const& options) {
  if (n == 0) throw InputError("algebras must be nonempty");
  auto const start = Clock::now();
  EnumerationResult result;
  std::set<std::vector<Element>> seen;
  auto offer = [&](FiniteAlgebra alg) {
    ++result.candidates;
    if (!verify_cd4(alg).ok) return;
    if (seen.insert(canonical_form(alg)).second) result.algebras.push_back(std::move(alg));
  };
  auto out_of_time = [&] {
    if (seconds_since(start) <= options.budget_seconds) return false;
    result.truncated = true;
    return true;
  };

  auto const pairs = ordered_pair_count(n);
  auto const triples = distinct_triple_count(n);
  if (n <= 3) {
    // Odometer over the pair entries.
    result.mode = n <= 2 ? "complete" : "pattern";
    result.truncated = n == 3;
    std::vector<Element> digits(2 * pairs, 0);
    std::vector<Element> perm(n);
    std::uint64_t code = 0;
    while (true) {
      // Keep only the lexicographically least relabelling of the pair entries.
      bool least = true;
      std::iota(perm.begin(), perm.end(), Element{0});
      std::vector<Element> image(2 * pairs);
      while (least && std::next_permutation(perm.begin(), perm.end())) {
        for (Element x = 0; x < n; ++x) {
          for (Element y = 0; y < n; ++y) {
            if (x == y) continue;
            auto const to = pair_index(n, perm[x], perm[y]);
            image[to] = perm[digits[pair_index(n, x, y)]];
            image[pairs + to] = perm[digits[pairs + pair_index(n, x, y)]];
          }
        }
        if (image < digits) least = false;
      }
      if (least) {
        FreeEntries free;
        free.outer.assign(digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(pairs));
        free.inner.assign(digits.begin() + static_cast<std::ptrdiff_t>(pairs), digits.end());
        std::mt19937_64 rng(options.seed * 0x9E3779B97F4A7C15ULL + code);
        for (std::size_t i = 0; i < 3 * triples; ++i) {
          free.distinct.push_back(static_cast<Element>(draw(rng, n)));
        }
        offer(cd4_from_free_entries(n, free));
        if ((result.candidates & 1023) == 0 && out_of_time()) break;
      }
      std::size_t i = 0;
      while (i < digits.size() && ++digits[i] == n) digits[i++] = 0;
      if (i == digits.size()) break;
      ++code;
    }
    return result;
  }

  result.mode = "sampled";
  result.truncated = true;
  std::mt19937_64 rng(options.seed);
  for (std::size_t s = 0; s < options.samples; ++s) {
    offer(random_cd4_algebra(n, rng));
    if ((s & 63) == 0 && out_of_time()) break;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Subuniverses and ideals
// ---------------------------------------------------------------------------

namespace {

template <typename Close>
std::vector<ElementSet> closure_family(std::size_t n, Close close) {
  std::set<ElementSet> seen;
  std::deque<ElementSet> queue;
  auto offer = [&](ElementSet s) {
    if (seen.insert(s).second) queue.push_back(std::move(s));
  };
  for (std::size_t x = 0; x < n; ++x) offer(close(ElementSet{x}));
  while (!queue.empty()) {
    auto u = std::move(queue.front());
    queue.pop_front();
    std::vector<bool> in(n, false);
    for (auto x : u) in[x] = true;
    for (std::size_t x = 0; x < n; ++x) {
      if (in[x]) continue;
      auto seed = u;
      seed.insert(std::upper_bound(seed.begin(), seed.end(), x), x);
      offer(close(seed));
    }
  }
  return {seen.begin(), seen.end()};
}

BinaryRelation decode_pairs(ElementSet const& codes, std::size_t n2) {
  BinaryRelation r;
  for (auto c : codes) r.emplace_back(static_cast<Element>(c / n2), static_cast<Element>(c % n2));
  return r;
}

}  // namespace

std::vector<ElementSet> all_subuniverses(Carrier const& d) {
  return closure_family(d.size(), [&](ElementSet const& s) { return sg_closure(d, s); });
}

std::vector<ElementSet> all_ideals(Carrier const& d, IdealSide side) {
  return closure_family(d.size(), [&](ElementSet const& s) { return ideal_closure(d, s, side); });
}

std::vector<BinaryRelation> enumerate_product_subuniverses(FiniteAlgebra const& b1,
                                                           FiniteAlgebra const& b2) {
  Carrier product(product_algebra(b1, b2));
  std::vector<BinaryRelation> out;
  for (auto const& s : all_subuniverses(product)) out.push_back(decode_pairs(s, b2.size()));
  return out;
}

std::vector<BinaryRelation> enumerate_subdirect(FiniteAlgebra const& b1, FiniteAlgebra const& b2) {
  std::vector<BinaryRelation> out;
  for (auto& r : enumerate_product_subuniverses(b1, b2)) {
    if (is_subdirect_binary(r, b1.size(), b2.size())) out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lemma suite
// ---------------------------------------------------------------------------

namespace {

enum LemmaId : std::size_t {
  kProductFromRow,
  kConnected,
  kFixedBySideOp,
  kSeesWhole,
  kMinimalIdeal,
  kIdealProduct,
  kLemmaCount
};

std::vector<LemmaReport> empty_reports() {
  return {
      {"product-from-row", "if B1 x {d} is inside R then R = B1 x D", 0, 0, {}},
      {"g1-connected", "G1 is connected", 0, 0, {}},
      {"fixed-by-side-op", "then r(c,a) = c for all c in C and a in B1", 0, 0, {}},
      {"sees-whole", "B2 contains an element that sees the whole of B1", 0, 0, {}},
      {"minimal-ideal-projection",
       "(a,b) generating a minimal ideal of R gives minimal ideals in B1 and B2, and every "
       "minimal generator of B1 lifts",
       0, 0, {}},
      {"ideal-product", "S = B1 x pi2(S)", 0, 0, {}},
  };
}

struct Candidate {
  FiniteAlgebra alg;
  bool simple = false;
  std::array<bool, 2> ideal_free{};                   // per side
  std::array<std::vector<bool>, 2> minimal_gen;       // per side
  std::array<std::vector<ElementSet>, 2> minimal;     // minimal ideals per side

  bool fully_ideal_free() const { return ideal_free[0] && ideal_free[1]; }
};

Candidate describe_candidate(FiniteAlgebra alg) {
  if (!verify_cd4(alg).ok || !verify_lr_idempotence(alg).ok) {
    throw InvariantViolation("lemma suite candidate lost an identity");
  }
  Candidate c;
  c.simple = alg.size() >= 2 && is_simple(alg);
  Carrier d(alg);
  for (auto side : kSides) {
    auto const s = static_cast<std::size_t>(side);
    c.ideal_free[s] = true;
    std::set<ElementSet> minimal;
    c.minimal_gen[s] = minimal_ideal_generators(d, side);
    for (std::size_t x = 0; x < d.size(); ++x) {
      auto ideal = ideal_closure(d, {x}, side);
      if (ideal.size() != d.size()) c.ideal_free[s] = false;
      if (c.minimal_gen[s][x]) minimal.insert(std::move(ideal));
    }
    c.minimal[s].assign(minimal.begin(), minimal.end());
  }
  c.alg = std::move(alg);
  return c;
}

std::string dump_algebra(FiniteAlgebra const& alg) {
  std::ostringstream out;
  out << "size " << alg.size();
  for (auto op : kOps) {
    out << " " << op_name(op) << "=[";
    auto const& t = alg.op(op).table();
    for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "," : "") << t[i];
    out << "]";
  }
  return out.str();
}

std::string dump_witness(Candidate const& b1, Candidate const& b2, BinaryRelation const& r,
                         std::string const& detail) {
  std::ostringstream out;
  out << "B1: " << dump_algebra(b1.alg) << "; B2: " << dump_algebra(b2.alg) << "; R: {";
  for (std::size_t i = 0; i < r.size(); ++i) {
    out << (i ? "," : "") << "(" << r[i].first << "," << r[i].second << ")";
  }
  out << "}; " << detail;
  return out.str();
}

constexpr std::size_t kMaxDumps = 10;

void check_pair(Candidate const& b1, Candidate const& b2, std::vector<LemmaReport>& reports,
                std::size_t& relations) {
  auto const n1 = b1.alg.size();
  auto const n2 = b2.alg.size();
  auto const product = product_algebra(b1.alg, b2.alg);
  Carrier whole(product);
  Carrier c1(b1.alg);
  auto fail = [&](LemmaId id, BinaryRelation const& r, std::string const& detail) {
    auto& rep = reports[id];
    if (rep.counterexamples.size() < kMaxDumps) {
      rep.counterexamples.push_back(dump_witness(b1, b2, r, detail));
    } else {
      rep.counterexamples.emplace_back();  // counted, not dumped
    }
  };

  for (auto const& codes : all_subuniverses(whole)) {
    ++relations;
    auto const r = decode_pairs(codes, n2);
    std::vector<std::vector<Element>> column(n2);  // B1-elements seen by each b
    std::vector<bool> in1(n1, false);
    for (auto [x, y] : r) {
      column[y].push_back(x);
      in1[x] = true;
    }
    std::vector<Element> d;
    for (Element y = 0; y < n2; ++y) {
      if (!column[y].empty()) d.push_back(y);
    }
    bool const onto1 = std::all_of(in1.begin(), in1.end(), [](bool b) { return b; });
    bool const subdirect = onto1 && d.size() == n2;
    bool const has_row = std::any_of(column.begin(), column.end(),
                                     [&](auto const& col) { return col.size() == n1; });

    // Subdirect in B1 x D with D a minimal ideal of the opposite side.
    for (auto side : kSides) {
      auto const s = static_cast<std::size_t>(side);
      auto const& opposite = b2.minimal[1 - s];
      ElementSet dset(d.begin(), d.end());
      bool hyp = b1.ideal_free[s] && onto1 && has_row &&
                 std::find(opposite.begin(), opposite.end(), dset) != opposite.end();
      if (!hyp) {
        ++reports[kProductFromRow].vacuous;
        continue;
      }
      ++reports[kProductFromRow].checked;
      if (r.size() != n1 * d.size()) fail(kProductFromRow, r, std::string("side ") + side_name(side));
    }

    if (!subdirect) continue;
    bool const fan2 = std::any_of(column.begin(), column.end(),
                                  [](auto const& col) { return col.size() >= 2; });

    // G1 connectivity.
    if (b1.simple && fan2) {
      ++reports[kConnected].checked;
      std::vector<bool> reached(n1, false);
      std::vector<Element> stack{0};
      reached[0] = true;
      while (!stack.empty()) {
        auto a = stack.back();
        stack.pop_back();
        for (auto const& col : column) {
          if (std::find(col.begin(), col.end(), a) == col.end()) continue;
          for (auto a2 : col) {
            if (!reached[a2]) {
              reached[a2] = true;
              stack.push_back(a2);
            }
          }
        }
      }
      if (!std::all_of(reached.begin(), reached.end(), [](bool b) { return b; })) {
        fail(kConnected, r, "G1 disconnected");
      }
    } else {
      ++reports[kConnected].vacuous;
    }

    // An element of B2 seeing all of B1.
    if (b1.simple && b1.fully_ideal_free() && fan2) {
      ++reports[kSeesWhole].checked;
      if (!has_row) fail(kSeesWhole, r, "no element of B2 sees all of B1");
    } else {
      ++reports[kSeesWhole].vacuous;
    }

    Carrier rc(product, 1, [&] {
      std::vector<Tuple> t;
      for (auto c : codes) t.push_back({static_cast<Element>(c)});
      return t;
    }());
    auto first = [&](std::size_t i) { return rc.element(i)[0] / static_cast<Element>(n2); };
    auto second = [&](std::size_t i) { return rc.element(i)[0] % static_cast<Element>(n2); };

    for (auto side : kSides) {
      auto const s = static_cast<std::size_t>(side);
      auto const tag = std::string("side ") + side_name(side);
      auto const gens = minimal_ideal_generators(rc, side);

      // Minimal generators project to minimal generators, and lift.
      for (std::size_t i = 0; i < rc.size(); ++i) {
        if (!gens[i]) continue;
        ++reports[kMinimalIdeal].checked;
        if (!b1.minimal_gen[s][first(i)] || !b2.minimal_gen[s][second(i)]) {
          fail(kMinimalIdeal, r, tag + ", part 1 at element " + std::to_string(i));
        }
      }
      for (Element a = 0; a < n1; ++a) {
        if (!b1.minimal_gen[s][a]) continue;
        ++reports[kMinimalIdeal].checked;
        bool lifted = false;
        for (std::size_t i = 0; i < rc.size() && !lifted; ++i) lifted = gens[i] && first(i) == a;
        if (!lifted) fail(kMinimalIdeal, r, tag + ", part 2 at " + std::to_string(a));
      }

      // Minimal ideals of R are products.
      if (b1.simple && b1.fully_ideal_free() && fan2) {
        std::set<ElementSet> minimal;
        for (std::size_t i = 0; i < rc.size(); ++i) {
          if (gens[i]) minimal.insert(ideal_closure(rc, {i}, side));
        }
        for (auto const& ideal : minimal) {
          ++reports[kIdealProduct].checked;
          std::set<Element> proj2;
          for (auto i : ideal) proj2.insert(second(i));
          if (ideal.size() != n1 * proj2.size()) fail(kIdealProduct, r, tag);
        }
      } else {
        ++reports[kIdealProduct].vacuous;
      }

      // Side-ideals of R that are graphs of maps onto their first projection.
      if (b1.simple && fan2) {
        for (auto const& ideal : all_ideals(rc, side)) {
          std::vector<std::set<Element>> seen(n2);
          std::set<Element> proj1;
          for (auto i : ideal) {
            seen[second(i)].insert(first(i));
            proj1.insert(first(i));
          }
          bool graph = std::all_of(seen.begin(), seen.end(),
                                   [](auto const& col) { return col.size() <= 1; });
          if (!graph) {
            ++reports[kFixedBySideOp].vacuous;
            continue;
          }
          ++reports[kFixedBySideOp].checked;
          for (auto c : proj1) {
            for (Element a = 0; a < n1; ++a) {
              if (c1.side_op(side, c, a) != c) {
                fail(kFixedBySideOp, r, tag + ", c=" + std::to_string(c) + " a=" + std::to_string(a));
              }
            }
          }
        }
      } else {
        ++reports[kFixedBySideOp].vacuous;
      }
    }
  }
}

}  // namespace

bool LemmaSuiteResult::ok() const {
  return std::all_of(reports.begin(), reports.end(),
                     [](LemmaReport const& r) { return r.counterexamples.empty(); });
}

LemmaSuiteResult lemma_suite(LemmaSuiteOptions const& options) {
  auto const start = Clock::now();
  LemmaSuiteResult result;
  result.reports = empty_reports();

  // Distinct preprocessed base algebras, smallest first.
  std::vector<FiniteAlgebra> bases;
  {
    std::set<std::vector<Element>> seen;
    for (std::size_t n = 1; n <= options.max_size; ++n) {
      EnumerationOptions eo;
      eo.seed = options.seed;
      eo.samples = options.samples;
      eo.budget_seconds = options.budget_seconds;
      auto e = enumerate_cd4_algebras(n, eo);
      result.enumeration_partial = result.enumeration_partial || e.truncated;
      for (auto const& alg : e.algebras) {
        auto pre = preprocess_terms(alg).algebra;
        if (seen.insert(canonical_form(pre)).second) bases.push_back(std::move(pre));
      }
    }
  }
  result.bases_total = bases.size();

  // Candidate algebras: each base with its subalgebras and quotients,
  // deduplicated by isomorphism type across all bases.
  std::vector<Candidate> pool;
  std::map<std::vector<Element>, std::size_t> pool_index;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::set<std::pair<std::size_t, std::size_t>> pair_seen;
  std::vector<std::size_t> pair_base;
  auto intern = [&](FiniteAlgebra alg) {
    auto key = canonical_form(alg);
    auto it = pool_index.find(key);
    if (it != pool_index.end()) return it->second;
    pool.push_back(describe_candidate(std::move(alg)));
    pool_index.emplace(std::move(key), pool.size() - 1);
    return pool.size() - 1;
  };
  for (std::size_t bi = 0; bi < bases.size(); ++bi) {
    if (seconds_since(start) > options.budget_seconds) {
      result.budget_exhausted = true;
      break;
    }
    auto const& base = bases[bi];
    std::set<std::size_t> members{intern(base), intern(trivial_algebra())};
    Carrier d(base);
    for (auto const& s : all_subuniverses(d)) {
      if (s.size() >= 2 && s.size() < base.size()) {
        std::vector<Element> universe(s.begin(), s.end());
        members.insert(intern(subalgebra(base, universe)));
      }
    }
    for (auto const& theta : all_congruences(base)) {
      if (!theta.is_identity() && !theta.is_full()) {
        members.insert(intern(quotient_algebra(base, theta)));
      }
    }
    for (auto i : members) {
      for (auto j : members) {
        if (pair_seen.insert({i, j}).second) {
          pairs.emplace_back(i, j);
          pair_base.push_back(bi);
        }
      }
    }
  }
  for (auto const& c : pool) {
    if (c.simple && c.fully_ideal_free()) ++result.simple_ideal_free;
  }
  // Pairs whose hypotheses can hold go first so a short budget still
  // exercises the non-vacuous cases.
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rank = [&](std::size_t p) {
    auto const& b1 = pool[pairs[p].first];
    return b1.simple && b1.fully_ideal_free() ? 0 : b1.simple ? 1 : 2;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return rank(x) < rank(y); });

  auto const jobs = std::max<std::size_t>(1, options.jobs);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> out_of_time{false};
  std::vector<std::vector<LemmaReport>> partial(jobs, empty_reports());
  std::vector<std::size_t> relations(jobs, 0);
  std::vector<bool> done(pairs.size(), false);
  std::mutex done_mutex;
  auto worker = [&](std::size_t w) {
    while (true) {
      auto const i = next.fetch_add(1);
      if (i >= order.size()) return;
      if (seconds_since(start) > options.budget_seconds) {
        out_of_time = true;
        return;
      }
      auto const [p1, p2] = pairs[order[i]];
      check_pair(pool[p1], pool[p2], partial[w], relations[w]);
      std::lock_guard lock(done_mutex);
      done[order[i]] = true;
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
  }

  for (std::size_t w = 0; w < jobs; ++w) {
    result.relations += relations[w];
    for (std::size_t l = 0; l < kLemmaCount; ++l) {
      auto& into = result.reports[l];
      auto const& from = partial[w][l];
      into.checked += from.checked;
      into.vacuous += from.vacuous;
      into.counterexamples.insert(into.counterexamples.end(), from.counterexamples.begin(),
                                  from.counterexamples.end());
    }
  }
  for (auto& rep : result.reports) {
    std::sort(rep.counterexamples.begin(), rep.counterexamples.end());
  }
  result.pairs = static_cast<std::size_t>(std::count(done.begin(), done.end(), true));
  // A base is fully checked when all of its pairs were.
  std::vector<bool> base_done(bases.size(), true);
  std::vector<bool> base_seen(bases.size(), false);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    base_seen[pair_base[p]] = true;
    if (!done[p]) base_done[pair_base[p]] = false;
  }
  for (std::size_t bi = 0; bi < bases.size(); ++bi) {
    if (base_seen[bi] && base_done[bi]) ++result.bases_checked;
  }
  if (out_of_time || result.pairs < pairs.size() || result.bases_checked < result.bases_total) {
    result.budget_exhausted = true;
  }
  result.seconds = seconds_since(start);
  return result;
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

Instance random_instance(std::uint64_t seed, InstanceParams const& params) {
  if (params.max_a < 1 || params.max_b < 1 || params.max_relations < 1 || params.max_arity < 1) {
    throw InputError("instance parameters must be positive");
  }
  std::mt19937_64 rng(seed);
  auto const nb = params.max_b == 1 ? 1 : 2 + draw(rng, params.max_b - 1);
  static constexpr std::array<double, 4> kBias{1.0, 0.8, 0.5, 0.0};
  auto alg = random_cd4_algebra(nb, rng, kBias[draw(rng, kBias.size())]);

  auto const relation_count = 1 + draw(rng, params.max_relations);
  RelStructure b(nb);
  for (std::size_t r = 0; r < relation_count; ++r) {
    auto const arity = params.max_arity == 1 ? 1 : 2 + draw(rng, params.max_arity - 1);
    std::vector<Tuple> seeds(1 + draw(rng, 2));
    for (auto& t : seeds) {
      t.resize(arity);
      for (auto& v : t) v = static_cast<Element>(draw(rng, nb));
    }
    b.add("R" + std::to_string(r), inv_close_relation(Relation(nb, arity, seeds), alg));
  }

  auto const na = params.max_a == 1 ? 1 : 2 + draw(rng, params.max_a - 1);
  Instance inst{RelStructure(na), std::move(b), std::move(alg), std::nullopt};
  if (params.planted) {
    std::vector<Element> h(na);
    for (auto& v : h) v = static_cast<Element>(draw(rng, nb));
    inst.planted = h;
  }
  for (auto const& [name, rel] : inst.b.relations()) {
    auto const wanted = 1 + draw(rng, na + 1);
    std::vector<Tuple> tuples;
    Tuple t(rel.arity()), image(rel.arity());
    for (std::size_t attempt = 0; attempt < 64 * wanted && tuples.size() < wanted; ++attempt) {
      for (auto& v : t) v = static_cast<Element>(draw(rng, na));
      if (inst.planted) {
        for (std::size_t i = 0; i < t.size(); ++i) image[i] = (*inst.planted)[t[i]];
        if (!rel.contains(image)) continue;
      }
      tuples.push_back(t);
    }
    inst.a.add(name, Relation(na, rel.arity(), std::move(tuples)));
  }
  return inst;
}

}  // namespace cdw
