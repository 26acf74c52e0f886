#include "cdw/reductions.hpp"

#include <algorithm>

#include "cdw/jonsson.hpp"

namespace cdw {

namespace {

std::string describe(std::vector<Element> const& set) {
  std::string s = "{";
  for (auto v : set) s += std::to_string(v) + ",";
  if (s.size() > 1) s.pop_back();
  return s + "}";
}

std::size_t index_in(std::vector<Element> const& sorted, Element v) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  if (it == sorted.end() || *it != v) throw InvariantViolation("value outside H_m");
  return static_cast<std::size_t>(it - sorted.begin());
}

std::vector<Element> active_coordinates(Strategy const& h) {
  std::vector<Element> out;
  for (Element a = 0; a < h.a_size(); ++a) {
    if (h.singleton(a).size() > 1) out.push_back(a);
  }
  return out;
}

}  // namespace

std::uint32_t Platoon::block_of(Element m, Element v) const {
  return theta.at(m).block_of(static_cast<Element>(index_in(values.at(m), v)));
}

std::vector<std::uint32_t> Platoon::bijection(Element m1, Element m2) const {
  if (m1 == m2) {
    std::vector<std::uint32_t> id(theta.at(m1).block_count());
    for (std::uint32_t i = 0; i < id.size(); ++i) id[i] = i;
    return id;
  }
  return tau.at({m1, m2});
}

std::optional<Congruence> canonical_coatom(FiniteAlgebra const& alg) {
  auto coatoms = coatom_congruences(alg);
  if (coatoms.degenerate) return std::nullopt;
  return coatoms.congruences.front();
}

Carrier value_carrier(Strategy const& h, Element a, FiniteAlgebra const& alg) {
  std::vector<Tuple> values;
  for (auto v : h.values(a)) values.push_back({v});
  return Carrier(alg, 1, std::move(values));
}

// ---------------------------------------------------------------------------
// Ideal reduction
// ---------------------------------------------------------------------------

Strategy ideal_reduce(Strategy const& h, Element a, std::vector<Element> const& x, IdealSide side,
                      RelStructure const& a_struct, RelStructure const& b_struct,
                      FiniteAlgebra const& alg) {
  if (a >= h.a_size()) throw InputError("coordinate out of range");
  auto carrier = value_carrier(h, a, alg);
  ElementSet xs;
  for (auto v : x) {
    auto i = carrier.index_of({v});
    if (!i) throw PreconditionError("X is not contained in H_a");
    xs.push_back(*i);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.empty()) throw PreconditionError("X must be nonempty");
  if (xs.size() == carrier.size()) throw PreconditionError("X is not a proper subset of H_a");
  if (!is_ideal(carrier, xs, side)) throw PreconditionError("X is not an ideal of H_a");

  std::vector<bool> in_x(h.b_size(), false);
  for (auto v : x) in_x[v] = true;
  auto const top = std::min(h.k(), h.a_size());
  Strategy out(h.k(), h.a_size(), h.b_size());

  for (std::size_t key = 0; key < h.key_count(); ++key) {
    auto const& set = h.index_set(key);
    auto pos = std::lower_bound(set.begin(), set.end(), a);
    auto& target = out.at(key);
    if (pos != set.end() && *pos == a) {
      auto const p = static_cast<std::size_t>(pos - set.begin());
      for (auto c : h.at(key).codes()) {
        if (in_x[h.at(key).decode(c)[p]]) target.insert(c);
      }
    } else if (set.size() < top) {
      auto bigger = set;
      bigger.insert(bigger.begin() + (pos - set.begin()), a);
      auto const p = static_cast<std::size_t>(pos - set.begin());
      auto const& source = h.at(h.key_of(bigger));
      for (auto c : source.codes()) {
        if (in_x[source.decode(c)[p]]) target.insert(h.project(c, bigger.size(), p));
      }
    }
  }
  // Second stage: full-width sets without a, from their restrictions.
  for (std::size_t key = 0; key < h.key_count(); ++key) {
    auto const& set = h.index_set(key);
    if (set.size() < top || std::binary_search(set.begin(), set.end(), a)) continue;
    std::vector<Strategy::Cover> below;
    for (auto ci : h.covers_touching(key)) {
      if (h.covers()[ci].big == key) below.push_back(h.covers()[ci]);
    }
    for (auto c : h.at(key).codes()) {
      bool keep = std::all_of(below.begin(), below.end(), [&](Strategy::Cover const& cv) {
        return out.at(cv.small).contains(h.project(c, set.size(), cv.position));
      });
      if (keep) out.at(key).insert(c);
    }
  }

  if (auto why = winning_violation(out, a_struct, b_struct, alg)) {
    throw InvariantViolation("ideal reduction at " + std::to_string(a) + " (" + side_name(side) +
                             "): " + *why);
  }
  std::vector<Element> expected;
  for (auto i : xs) expected.push_back(carrier.element(i)[0]);
  if (out.values(a) != expected) {
    throw InvariantViolation("ideal reduction at " + std::to_string(a) + ": H'_a differs from X");
  }
  for (std::size_t key = 0; key < h.key_count(); ++key) {
    if (!out.at(key).subset_of(h.at(key))) {
      throw InvariantViolation("ideal reduction enlarged H" + describe(h.index_set(key)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Platoons
// ---------------------------------------------------------------------------

Platoon find_platoon(Strategy const& h, FiniteAlgebra const& alg) {
  auto active = active_coordinates(h);
  if (active.empty()) throw PreconditionError("find_platoon needs a non-singleton coordinate");
  Platoon p;
  auto const m0 = active.front();
  p.values[m0] = h.values(m0);
  auto coatom = canonical_coatom(subalgebra(alg, p.values[m0]));
  if (!coatom) throw InvariantViolation("non-singleton H_m without a coatom");
  p.members = {m0};
  p.theta.emplace(m0, *coatom);

  bool grew = true;
  while (grew) {
    grew = false;
    for (auto n : active) {
      if (std::binary_search(p.members.begin(), p.members.end(), n)) continue;
      auto values_n = h.values(n);
      for (auto m : p.members) {
        std::vector<std::optional<std::uint32_t>> phi(values_n.size());
        bool function = true;
        for (auto [u, v] : h.pairs(n, m)) {
          auto& slot = phi[index_in(values_n, u)];
          auto b = p.block_of(m, v);
          if (slot && *slot != b) {
            function = false;
            break;
          }
          slot = b;
        }
        if (!function) continue;
        std::vector<Element> labels;
        for (auto const& b : phi) {
          if (!b) throw InvariantViolation("H_{n,m} does not project onto H_n");
          labels.push_back(*b);
        }
        p.values[n] = values_n;
        p.theta.emplace(n, kernel(subalgebra(alg, values_n), labels));
        p.members.insert(std::upper_bound(p.members.begin(), p.members.end(), n), n);
        grew = true;
        break;
      }
      if (grew) break;
    }
  }

  for (auto m1 : p.members) {
    for (auto m2 : p.members) {
      if (m1 == m2) continue;
      std::vector<std::uint32_t> t(p.theta.at(m1).block_count(), 0);
      for (auto [u, v] : h.pairs(m1, m2)) t[p.block_of(m1, u)] = p.block_of(m2, v);
      p.tau.emplace(std::pair{m1, m2}, std::move(t));
    }
  }
  if (auto why = platoon_violation(h, p)) throw InvariantViolation("platoon: " + *why);
  return p;
}

std::optional<std::string> platoon_violation(Strategy const& h, Platoon const& p) {
  if (p.members.empty()) return "empty platoon";
  for (auto m : p.members) {
    if (p.values.at(m) != h.values(m)) return "stale values for " + std::to_string(m);
    if (p.theta.at(m).is_full()) return "theta_" + std::to_string(m) + " is the full relation";
  }
  // (1) graphs of bijections between the quotients.
  for (auto m1 : p.members) {
    for (auto m2 : p.members) {
      if (m1 == m2) continue;
      auto const& t = p.tau.at({m1, m2});
      if (t.size() != p.theta.at(m1).block_count() ||
          t.size() != p.theta.at(m2).block_count()) {
        return "quotients of " + std::to_string(m1) + " and " + std::to_string(m2) +
               " differ in size";
      }
      std::vector<bool> hit(t.size(), false);
      for (auto [u, v] : h.pairs(m1, m2)) {
        auto b1 = p.block_of(m1, u);
        if (t[b1] != p.block_of(m2, v)) {
          return "statement (1) fails for " + std::to_string(m1) + "," + std::to_string(m2);
        }
        hit[b1] = true;
      }
      auto image = t;
      std::sort(image.begin(), image.end());
      if (std::adjacent_find(image.begin(), image.end()) != image.end() ||
          !std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) {
        return "tau_" + std::to_string(m1) + "," + std::to_string(m2) + " is not a bijection";
      }
    }
  }
  // (2) full products against every other non-singleton coordinate.
  for (auto n : active_coordinates(h)) {
    if (std::binary_search(p.members.begin(), p.members.end(), n)) continue;
    auto const values_n = h.values(n);
    for (auto m : p.members) {
      std::vector<std::pair<Element, std::uint32_t>> seen;
      for (auto [u, v] : h.pairs(n, m)) seen.emplace_back(u, p.block_of(m, v));
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      if (seen.size() != values_n.size() * p.theta.at(m).block_count()) {
        return "statement (2) fails for " + std::to_string(n) + "," + std::to_string(m);
      }
    }
  }
  // (3) coherence of the bijections.
  for (auto m1 : p.members) {
    for (auto m2 : p.members) {
      auto const t12 = p.bijection(m1, m2);
      for (auto m3 : p.members) {
        auto const t23 = p.bijection(m2, m3);
        auto const t13 = p.bijection(m1, m3);
        for (std::size_t b = 0; b < t12.size(); ++b) {
          if (t23[t12[b]] != t13[b]) {
            return "statement (3) fails for " + std::to_string(m1) + "," + std::to_string(m2) +
                   "," + std::to_string(m3);
          }
        }
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Simple reduction
// ---------------------------------------------------------------------------

SimpleReduction simple_reduce(Strategy const& h, Platoon const& p, RelStructure const& a_struct,
                              RelStructure const& b_struct, FiniteAlgebra const& alg) {
  if (auto why = platoon_violation(h, p)) throw PreconditionError("invalid platoon: " + *why);
  SimpleReduction result{Strategy(h.k(), h.a_size(), h.b_size()), {}};
  auto const m0 = p.leader();
  std::map<Element, std::vector<bool>> in_class;
  for (auto m : p.members) {
    auto const target = p.bijection(m0, m)[p.block_of(m0, p.values.at(m0).front())];
    auto& flags = in_class[m];
    flags.assign(h.b_size(), false);
    for (auto v : p.values.at(m)) {
      if (p.block_of(m, v) == target) {
        flags[v] = true;
        result.classes[m].push_back(v);
      }
    }
  }

  auto& out = result.strategy;
  for (std::size_t key = 0; key < h.key_count(); ++key) {
    auto const& set = h.index_set(key);
    auto carrier = carrier_of(h, key, alg);
    auto minimal = minimal_ideal_generators(carrier, IdealSide::R);
    ElementSet g;
    for (std::size_t i = 0; i < carrier.size(); ++i) {
      if (!minimal[i]) continue;
      auto const& t = carrier.element(i);
      bool inside = true;
      for (std::size_t j = 0; j < set.size() && inside; ++j) {
        auto it = in_class.find(set[j]);
        if (it != in_class.end() && !it->second[t[j]]) inside = false;
      }
      if (inside) g.push_back(i);
    }
    if (g.empty()) throw InvariantViolation("simple reduction: G" + describe(set) + " is empty");
    for (auto i : sg_closure(carrier, g)) out.at(key).insert(out.at(key).encode(carrier.element(i)));
    if (!out.at(key).subset_of(h.at(key))) {
      throw InvariantViolation("simple reduction enlarged H" + describe(set));
    }
  }
  for (auto const& [m, cls] : result.classes) {
    for (auto v : out.values(m)) {
      if (!in_class[m][v]) {
        throw InvariantViolation("simple reduction: G_" + std::to_string(m) + " leaves C_m");
      }
    }
  }
  if (auto why = winning_violation(out, a_struct, b_struct, alg)) {
    throw InvariantViolation("simple reduction: " + *why);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Solve
// ---------------------------------------------------------------------------

SolveResult solve(RelStructure const& a, RelStructure const& b, FiniteAlgebra const& alg,
                  SolveOptions const& options) {
  require_same_vocabulary(a, b);
  if (alg.size() != b.universe()) throw InputError("algebra and template sizes differ");
  auto report = verify_cd4(alg);
  if (!report.ok) {
    throw PreconditionError("algebra fails " + report.failures.front().identity);
  }
  if (!options.unchecked && !preserved_by(alg, b)) {
    throw PreconditionError("template relations are not preserved by the algebra");
  }
  auto const terms = preprocess_terms(alg).algebra;

  SolveResult result;
  auto& trace = result.trace;
  trace.k = choose_k(a);
  try {
    auto fixpoint = enforce(init_full(a, b, trace.k));
    if (!fixpoint) {
      trace.steps.push_back({"enforce", {}, {}, 0, {}, {}, 0});
      return result;
    }
    auto h = std::move(*fixpoint);
    trace.steps.push_back({"enforce", {}, {}, 0, {}, {}, h.potential()});
    if (auto why = winning_violation(h, a, b, terms)) {
      throw InvariantViolation("consistency fixpoint: " + *why);
    }

    while (true) {
      auto active = active_coordinates(h);
      if (active.empty()) {
        result.homomorphism = extract_solution(h, a, b);
        return result;
      }
      auto const before = h.potential();
      bool reduced = false;
      for (auto c : active) {
        auto carrier = value_carrier(h, c, terms);
        auto ideal = find_proper_ideal(carrier);
        if (!ideal) continue;
        std::vector<Element> x;
        for (auto i : ideal->elements) x.push_back(carrier.element(i)[0]);
        h = ideal_reduce(h, c, x, ideal->side, a, b, terms);
        trace.steps.push_back({"ideal_reduce", c, ideal->side, x.size(), {}, {}, h.potential()});
        reduced = true;
        break;
      }
      if (!reduced) {
        auto platoon = find_platoon(h, terms);
        auto sr = simple_reduce(h, platoon, a, b, terms);
        TraceStep step{"simple_reduce", {}, {}, 0, platoon.members, {}, 0};
        for (auto m : platoon.members) step.class_sizes.push_back(sr.classes.at(m).size());
        h = std::move(sr.strategy);
        step.potential = h.potential();
        trace.steps.push_back(std::move(step));
      }
      if (h.potential() >= before) throw InvariantViolation("potential did not decrease");
    }
  } catch (SolveFailure const&) {
    throw;
  } catch (InvariantViolation const& e) {
    throw SolveFailure(e.what(), trace);
  }
}

}  // namespace cdw
