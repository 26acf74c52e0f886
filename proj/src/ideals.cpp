#include "cdw/ideals.hpp"

#include <algorithm>
#include <numeric>

#include "cdw/error.hpp"

namespace cdw {

namespace {

// Ternary tables are materialised up to this many elements.
constexpr std::size_t kMaterialiseLimit = 96;
constexpr std::uint64_t kDenseIndexLimit = std::uint64_t{1} << 22;

std::vector<bool> as_flags(ElementSet const& s, std::size_t n) {
  std::vector<bool> in(n, false);
  for (auto x : s) {
    if (x >= n) throw InputError("element index out of range");
    in[x] = true;
  }
  return in;
}

ElementSet from_flags(std::vector<bool> const& in) {
  ElementSet out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i]) out.push_back(i);
  }
  return out;
}

// Semi-naive closure: every triple is evaluated when its largest member is
// processed; with `side` set, absorption side_op(x, y) for y in D as well.
ElementSet close(Carrier const& d, ElementSet const& seed, std::optional<IdealSide> side) {
  auto const n = d.size();
  std::vector<bool> in(n, false);
  std::vector<std::size_t> members;
  members.reserve(n);
  auto add = [&](std::size_t x) {
    if (!in[x]) {
      in[x] = true;
      members.push_back(x);
    }
  };
  for (auto x : seed) {
    if (x >= n) throw InputError("element index out of range");
    add(x);
  }
  for (std::size_t i = 0; i < members.size() && members.size() < n; ++i) {
    auto const e = members[i];
    if (side) {
      for (std::size_t y = 0; y < n; ++y) add(d.side_op(*side, e, y));
    }
    for (std::size_t a = 0; a <= i; ++a) {
      for (std::size_t b = 0; b <= i; ++b) {
        auto const u = members[a], v = members[b];
        for (auto op : kOps) {
          add(d.apply(op, e, u, v));
          add(d.apply(op, u, e, v));
          add(d.apply(op, u, v, e));
        }
      }
    }
  }
  return from_flags(in);
}

}  // namespace

char const* side_name(IdealSide side) noexcept { return side == IdealSide::L ? "L" : "R"; }

Carrier::Carrier(FiniteAlgebra const& alg) : Carrier(alg, 1, [&] {
  std::vector<Tuple> all;
  for (Element x = 0; x < alg.size(); ++x) all.push_back({x});
  return all;
}()) {}

Carrier::Carrier(FiniteAlgebra const& alg, std::size_t power, std::vector<Tuple> elements)
    : alg_(alg), power_(power), elements_(std::move(elements)) {
  if (elements_.empty()) throw InputError("carrier must be nonempty");
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
  for (auto const& t : elements_) {
    if (t.size() != power_) throw InputError("carrier tuple has the wrong length");
    for (auto v : t) {
      if (v >= alg_.size()) throw InputError("carrier tuple entry out of range");
    }
  }
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < power_ && space <= kDenseIndexLimit; ++i) space *= alg_.size();
  if (space <= kDenseIndexLimit) {
    dense_index_.assign(space, -1);
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      dense_index_[encode(elements_[i])] = static_cast<std::int32_t>(i);
    }
  } else {
    for (std::size_t i = 0; i < elements_.size(); ++i) sparse_index_[encode(elements_[i])] = i;
  }

  auto const m = elements_.size();
  if (m <= kMaterialiseLimit) {
    tables_.assign(3, std::vector<std::uint32_t>(m * m * m));
    for (auto op : kOps) {
      auto& table = tables_[static_cast<std::size_t>(op)];
      for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = 0; y < m; ++y) {
          for (std::size_t z = 0; z < m; ++z) {
            table[(x * m + y) * m + z] = static_cast<std::uint32_t>(compute(op, x, y, z));
          }
        }
      }
    }
  } else {
    // Closure is still verified, one op at a time.
    for (auto op : kOps) {
      for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = 0; y < m; ++y) {
          for (std::size_t z = 0; z < m; ++z) compute(op, x, y, z);
        }
      }
    }
  }
  l_.resize(m * m);
  r_.resize(m * m);
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      l_[x * m + y] = apply(Op::p2, y, x, x);
      r_[x * m + y] = apply(Op::p2, x, x, y);
    }
  }
}

std::uint64_t Carrier::encode(Tuple const& t) const {
  std::uint64_t code = 0;
  for (auto v : t) code = code * alg_.size() + v;
  return code;
}

std::optional<std::size_t> Carrier::index_of(Tuple const& t) const {
  if (t.size() != power_) return std::nullopt;
  for (auto v : t) {
    if (v >= alg_.size()) return std::nullopt;
  }
  auto code = encode(t);
  if (!dense_index_.empty()) {
    auto i = dense_index_[code];
    if (i < 0) return std::nullopt;
    return static_cast<std::size_t>(i);
  }
  auto it = sparse_index_.find(code);
  if (it == sparse_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Carrier::compute(Op op, std::size_t x, std::size_t y, std::size_t z) const {
  auto const& a = elements_[x];
  auto const& b = elements_[y];
  auto const& c = elements_[z];
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < power_; ++i) code = code * alg_.size() + alg_.apply(op, a[i], b[i], c[i]);
  if (!dense_index_.empty()) {
    auto i = dense_index_[code];
    if (i < 0) throw InputError("carrier elements are not closed under the operations");
    return static_cast<std::size_t>(i);
  }
  auto it = sparse_index_.find(code);
  if (it == sparse_index_.end()) throw InputError("carrier elements are not closed under the operations");
  return it->second;
}

ElementSet Carrier::all() const {
  ElementSet out(size());
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

bool is_subuniverse(Carrier const& d, ElementSet const& c) {
  auto in = as_flags(c, d.size());
  for (auto x : c) {
    for (auto y : c) {
      for (auto z : c) {
        for (auto op : kOps) {
          if (!in[d.apply(op, x, y, z)]) return false;
        }
      }
    }
  }
  return true;
}

bool is_ideal(Carrier const& d, ElementSet const& c, IdealSide side) {
  if (c.empty()) throw InputError("an ideal must be nonempty");
  auto in = as_flags(c, d.size());
  for (auto x : c) {
    for (std::size_t y = 0; y < d.size(); ++y) {
      if (!in[d.side_op(side, x, y)]) return false;
    }
  }
  return is_subuniverse(d, c);
}

ElementSet ideal_closure(Carrier const& d, ElementSet const& seed, IdealSide side) {
  if (seed.empty()) throw InputError("ideal_closure needs a nonempty seed");
  return close(d, seed, side);
}

ElementSet sg_closure(Carrier const& d, ElementSet const& seed) {
  if (seed.empty()) throw InputError("sg_closure needs a nonempty seed");
  return close(d, seed, std::nullopt);
}

bool generates_minimal_ideal(Carrier const& d, std::size_t a, IdealSide side) {
  if (a >= d.size()) throw InputError("element index out of range");
  auto generated = ideal_closure(d, {a}, side);
  return std::all_of(generated.begin(), generated.end(), [&](std::size_t c) {
    return ideal_closure(d, {c}, side).size() == generated.size();
  });
}

std::vector<bool> minimal_ideal_generators(Carrier const& d, IdealSide side) {
  auto const n = d.size();
  std::vector<bool> result(n, false);
  std::vector<bool> decided(n, false);
  std::vector<std::vector<bool>> minimal;  // minimal ideals found so far
  std::vector<std::optional<ElementSet>> cache(n);
  auto principal = [&](std::size_t x) -> ElementSet const& {
    if (!cache[x]) cache[x] = ideal_closure(d, {x}, side);
    return *cache[x];
  };

  for (std::size_t t = 0; t < n; ++t) {
    if (decided[t]) continue;
    auto const& gen = principal(t);
    // If gen contains a known minimal ideal M, gen is minimal iff gen == M.
    bool settled = false;
    for (auto const& m : minimal) {
      if (std::all_of(gen.begin(), gen.end(), [&](std::size_t x) { return m[x]; })) {
        // gen is inside M, so equal to M by minimality.
        result[t] = true;
        settled = true;
        break;
      }
      std::size_t inside = 0, msize = 0;
      for (std::size_t x = 0; x < n; ++x) msize += m[x];
      for (auto x : gen) inside += m[x];
      if (inside == msize) {
        settled = true;  // M is a proper sub-ideal of gen
        break;
      }
    }
    if (settled) {
      decided[t] = true;
      continue;
    }
    // Descend to a minimal ideal below gen.
    ElementSet current = gen;
    bool descended = true;
    while (descended) {
      descended = false;
      for (auto c : current) {
        auto const& below = principal(c);
        if (below.size() < current.size()) {
          current = below;
          descended = true;
          break;
        }
      }
    }
    std::vector<bool> flags(n, false);
    for (auto x : current) {
      flags[x] = true;
      result[x] = true;
      decided[x] = true;
    }
    minimal.push_back(std::move(flags));
    if (current.size() != gen.size()) decided[t] = true;
  }
  return result;
}

bool is_ideal_free(Carrier const& d) {
  for (auto side : kSides) {
    for (std::size_t a = 0; a < d.size(); ++a) {
      if (ideal_closure(d, {a}, side).size() != d.size()) return false;
    }
  }
  return true;
}

std::optional<ProperIdeal> find_proper_ideal(Carrier const& d) {
  std::vector<ProperIdeal> candidates;
  for (std::size_t a = 0; a < d.size(); ++a) {
    for (auto side : kSides) {
      auto ideal = ideal_closure(d, {a}, side);
      if (ideal.size() < d.size()) candidates.push_back({std::move(ideal), side, a});
    }
  }
  auto strictly_inside = [](ElementSet const& small, ElementSet const& big) {
    return small.size() < big.size() &&
           std::includes(big.begin(), big.end(), small.begin(), small.end());
  };
  std::optional<ProperIdeal> best;
  for (auto const& c : candidates) {
    bool minimal = std::none_of(candidates.begin(), candidates.end(), [&](ProperIdeal const& o) {
      return strictly_inside(o.elements, c.elements);
    });
    if (!minimal) continue;
    // Candidates are already in (generator, side) order, so the first minimal
    // one wins; (size, lexicographic) only separates equal keys.
    if (!best) {
      best = c;
    } else if (best->generator == c.generator && best->side == c.side &&
               std::pair(c.elements.size(), c.elements) <
                   std::pair(best->elements.size(), best->elements)) {
      best = c;
    }
  }
  return best;
}

std::optional<std::pair<std::size_t, std::size_t>> absorption_witness(Carrier const& d,
                                                                      ElementSet const& x,
                                                                      IdealSide side) {
  if (x.empty()) throw InputError("absorption_witness needs a nonempty set");
  if (!is_subuniverse(d, x)) throw PreconditionError("absorption_witness needs a subuniverse");
  if (is_ideal(d, x, side)) throw PreconditionError("set is already an ideal");
  auto in = as_flags(x, d.size());
  for (auto a : x) {
    for (std::size_t b = 0; b < d.size(); ++b) {
      if (!in[b] && d.side_op(side, a, b) == b) return std::pair{a, b};
    }
  }
  return std::nullopt;
}

}  // namespace cdw
