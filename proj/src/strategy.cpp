#include "cdw/strategy.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <random>

#include "cdw/error.hpp"

namespace cdw {

namespace {

constexpr TupleCode kMaxTupleSpace = TupleCode{1} << 30;

std::uint64_t mask_of(std::vector<Element> const& set) {
  std::uint64_t m = 0;
  for (auto a : set) m |= std::uint64_t{1} << a;
  return m;
}

// Constraint tuples of A that lie inside an index set, as positions into it.
struct LocalConstraint {
  Relation const* target;
  std::vector<std::size_t> positions;
};

std::vector<LocalConstraint> constraints_inside(RelStructure const& a, RelStructure const& b,
                                                std::vector<Element> const& index_set) {
  std::vector<LocalConstraint> out;
  for (auto const& [name, rel] : a.relations()) {
    auto const& target = b.relation(name);
    for (auto const& t : rel.tuples()) {
      LocalConstraint c{&target, {}};
      bool inside = true;
      for (auto v : t) {
        auto it = std::lower_bound(index_set.begin(), index_set.end(), v);
        if (it == index_set.end() || *it != v) {
          inside = false;
          break;
        }
        c.positions.push_back(static_cast<std::size_t>(it - index_set.begin()));
      }
      if (inside) out.push_back(std::move(c));
    }
  }
  return out;
}

TupleSet partial_homomorphisms(RelStructure const& a, RelStructure const& b,
                               std::vector<Element> const& index_set) {
  TupleSet out(index_set.size(), b.universe());
  auto constraints = constraints_inside(a, b, index_set);
  Tuple image;
  for (TupleCode c = 0; c < out.space(); ++c) {
    auto t = out.decode(c);
    bool ok = true;
    for (auto const& con : constraints) {
      image.resize(con.positions.size());
      for (std::size_t i = 0; i < con.positions.size(); ++i) image[i] = t[con.positions[i]];
      if (!con.target->contains(image)) {
        ok = false;
        break;
      }
    }
    if (ok) out.insert(c);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// TupleSet
// ---------------------------------------------------------------------------

TupleSet::TupleSet(std::size_t width, std::size_t base) : width_(width), base_(base), space_(1) {
  for (std::size_t i = 0; i < width; ++i) {
    space_ *= base;
    if (space_ > kMaxTupleSpace) throw ResourceError("tuple space too large for a strategy");
  }
  words_.assign((space_ + 63) / 64, 0);
}

void TupleSet::insert(TupleCode c) {
  auto& w = words_[c >> 6];
  auto bit = std::uint64_t{1} << (c & 63);
  if (!(w & bit)) {
    w |= bit;
    ++count_;
  }
}

void TupleSet::erase(TupleCode c) {
  auto& w = words_[c >> 6];
  auto bit = std::uint64_t{1} << (c & 63);
  if (w & bit) {
    w &= ~bit;
    --count_;
  }
}

std::vector<TupleCode> TupleSet::codes() const {
  std::vector<TupleCode> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto w = words_[i];
    while (w) {
      out.push_back(i * 64 + static_cast<TupleCode>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

std::vector<Tuple> TupleSet::tuples() const {
  std::vector<Tuple> out;
  for (auto c : codes()) out.push_back(decode(c));
  return out;
}

TupleCode TupleSet::encode(std::span<Element const> t) const {
  if (t.size() != width_) throw InputError("tuple width mismatch");
  TupleCode c = 0;
  for (auto v : t) {
    if (v >= base_) throw InputError("tuple entry out of range");
    c = c * base_ + v;
  }
  return c;
}

Tuple TupleSet::decode(TupleCode c) const {
  Tuple t(width_);
  for (std::size_t i = width_; i-- > 0;) {
    t[i] = static_cast<Element>(c % base_);
    c /= base_;
  }
  return t;
}

bool TupleSet::subset_of(TupleSet const& other) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~other.words_[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Strategy
// ---------------------------------------------------------------------------

Strategy::Strategy(std::size_t k, std::size_t a_size, std::size_t b_size)
    : k_(k), a_size_(a_size), b_size_(b_size) {
  if (a_size > 64) throw InputError("instances are limited to 64 elements");
  if (b_size == 0) throw InputError("template universe must be nonempty");
  auto const top = std::min(k, a_size);
  pow_.assign(top + 1, 1);
  for (std::size_t i = 1; i <= top; ++i) pow_[i] = pow_[i - 1] * b_size;

  // Index sets by size, then lexicographically.
  for (std::size_t size = 1; size <= top; ++size) {
    std::vector<Element> set(size);
    for (std::size_t i = 0; i < size; ++i) set[i] = static_cast<Element>(i);
    while (true) {
      key_by_mask_.emplace(mask_of(set), index_sets_.size());
      index_sets_.push_back(set);
      std::size_t i = size;
      while (i > 0 && set[i - 1] == a_size - size + i - 1) --i;
      if (i == 0) break;
      ++set[i - 1];
      for (std::size_t j = i; j < size; ++j) set[j] = set[j - 1] + 1;
    }
  }
  for (auto const& set : index_sets_) sets_.emplace_back(set.size(), b_size);

  touching_.resize(index_sets_.size());
  for (std::size_t big = 0; big < index_sets_.size(); ++big) {
    auto const& j = index_sets_[big];
    if (j.size() < 2) continue;
    for (std::size_t p = 0; p < j.size(); ++p) {
      auto i = j;
      i.erase(i.begin() + static_cast<std::ptrdiff_t>(p));
      auto small = key_by_mask_.at(mask_of(i));
      touching_[small].push_back(covers_.size());
      touching_[big].push_back(covers_.size());
      covers_.push_back({small, big, p});
    }
  }
}

std::size_t Strategy::key_of(std::vector<Element> const& index_set) const {
  if (index_set.empty() || index_set.size() > std::min(k_, a_size_)) {
    throw InputError("index set size out of range");
  }
  for (std::size_t i = 0; i < index_set.size(); ++i) {
    if (index_set[i] >= a_size_) throw InputError("index set element out of range");
    if (i > 0 && index_set[i - 1] >= index_set[i]) throw InputError("index set must be sorted");
  }
  return key_by_mask_.at(mask_of(index_set));
}

TupleCode Strategy::project(TupleCode code, std::size_t width, std::size_t position) const {
  auto const low_digits = width - 1 - position;
  auto const high = code / pow_[low_digits + 1];
  auto const low = code % pow_[low_digits];
  return high * pow_[low_digits] + low;
}

std::vector<std::pair<Element, Element>> Strategy::pairs(Element u, Element v) const {
  if (u == v) throw InputError("pairs needs two distinct coordinates");
  auto const& set = at(key_of({std::min(u, v), std::max(u, v)}));
  std::vector<std::pair<Element, Element>> out;
  for (auto c : set.codes()) {
    auto t = set.decode(c);
    out.emplace_back(u < v ? t[0] : t[1], u < v ? t[1] : t[0]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Element> Strategy::values(Element a) const {
  std::vector<Element> out;
  for (auto c : singleton(a).codes()) out.push_back(static_cast<Element>(c));
  return out;
}

std::size_t Strategy::potential() const {
  std::size_t total = 0;
  for (Element a = 0; a < a_size_; ++a) total += singleton(a).size();
  return total;
}

// ---------------------------------------------------------------------------
// Consistency
// ---------------------------------------------------------------------------

std::size_t choose_k(RelStructure const& a) { return std::max<std::size_t>(3, a.max_arity()); }

Strategy init_full(RelStructure const& a, RelStructure const& b, std::size_t k) {
  require_same_vocabulary(a, b);
  Strategy h(k, a.universe(), b.universe());
  for (std::size_t key = 0; key < h.key_count(); ++key) {
    h.at(key) = partial_homomorphisms(a, b, h.index_set(key));
  }
  return h;
}

std::optional<Strategy> enforce(Strategy h, EnforceOptions const& options) {
  auto const& covers = h.covers();
  for (std::size_t key = 0; key < h.key_count(); ++key) {
    if (h.at(key).empty()) return std::nullopt;
  }
  std::vector<std::size_t> pending(covers.size());
  for (std::size_t i = 0; i < covers.size(); ++i) pending[i] = i;
  std::vector<bool> queued(covers.size(), true);
  std::optional<std::mt19937_64> rng;
  if (options.shuffle_seed) rng.emplace(*options.shuffle_seed);
  std::size_t head = 0;

  auto requeue = [&](std::size_t key) {
    for (auto c : h.covers_touching(key)) {
      if (!queued[c]) {
        queued[c] = true;
        pending.push_back(c);
      }
    }
  };

  while (head < pending.size()) {
    if (rng) {
      auto pick = head + (*rng)() % (pending.size() - head);
      std::swap(pending[head], pending[pick]);
    }
    auto const ci = pending[head++];
    queued[ci] = false;
    if (head > 4096 && head * 2 > pending.size()) {
      pending.erase(pending.begin(), pending.begin() + static_cast<std::ptrdiff_t>(head));
      head = 0;
    }
    auto const& cover = covers[ci];
    auto& small = h.at(cover.small);
    auto& big = h.at(cover.big);
    auto const width = big.width();

    TupleSet image(small.width(), small.base());
    std::vector<TupleCode> drop_big;
    for (auto c : big.codes()) {
      auto p = h.project(c, width, cover.position);
      if (small.contains(p)) {
        image.insert(p);
      } else {
        drop_big.push_back(c);
      }
    }
    bool small_changed = image.size() != small.size();
    if (small_changed) small = image;
    for (auto c : drop_big) big.erase(c);
    if (small.empty() || big.empty()) return std::nullopt;
    if (small_changed) requeue(cover.small);
    if (!drop_big.empty()) requeue(cover.big);
  }
  return h;
}

bool is_closed(TupleSet const& s, FiniteAlgebra const& alg) {
  if (alg.size() != s.base()) throw InputError("algebra and tuple set sizes differ");
  auto const w = s.width();
  auto const base = s.base();
  std::vector<Element> digits;
  auto codes = s.codes();
  digits.reserve(codes.size() * w);
  for (auto c : codes) {
    auto t = s.decode(c);
    digits.insert(digits.end(), t.begin(), t.end());
  }
  auto const m = codes.size();
  for (auto op : kOps) {
    auto const& table = alg.op(op);
    for (std::size_t x = 0; x < m; ++x) {
      for (std::size_t y = 0; y < m; ++y) {
        for (std::size_t z = 0; z < m; ++z) {
          TupleCode out = 0;
          for (std::size_t i = 0; i < w; ++i) {
            out = out * base + table.at(digits[x * w + i], digits[y * w + i], digits[z * w + i]);
          }
          if (!s.contains(out)) return false;
        }
      }
    }
  }
  return true;
}

std::optional<std::string> winning_violation(Strategy const& h, RelStructure const& a,
                                             RelStructure const& b, FiniteAlgebra const& alg) {
  if (h.a_size() != a.universe() || h.b_size() != b.universe() || alg.size() != b.universe()) {
    return "strategy shape does not match the structures";
  }
  auto describe = [&](std::size_t key) {
    std::string s = "{";
    for (auto v : h.index_set(key)) s += std::to_string(v) + ",";
    if (s.size() > 1) s.pop_back();
    return s + "}";
  };
  for (std::size_t key = 0; key < h.key_count(); ++key) {
    if (h.at(key).empty()) return "H" + describe(key) + " is empty";
  }
  for (auto const& cover : h.covers()) {
    auto const& small = h.at(cover.small);
    auto const& big = h.at(cover.big);
    TupleSet image(small.width(), small.base());
    for (auto c : big.codes()) image.insert(h.project(c, big.width(), cover.position));
    if (!image.subset_of(small)) {
      return "H" + describe(cover.big) + " is not closed under subfunctions into H" +
             describe(cover.small);
    }
    if (!small.subset_of(image)) {
      return "H" + describe(cover.small) + " lacks the forth property into H" +
             describe(cover.big);
    }
  }
  for (std::size_t key = 0; key < h.key_count(); ++key) {
    if (!h.at(key).subset_of(partial_homomorphisms(a, b, h.index_set(key)))) {
      return "H" + describe(key) + " contains a non-homomorphic tuple";
    }
    if (!is_closed(h.at(key), alg)) return "H" + describe(key) + " is not a subuniverse";
  }
  return std::nullopt;
}

bool is_winning(Strategy const& h, RelStructure const& a, RelStructure const& b,
                FiniteAlgebra const& alg) {
  return !winning_violation(h, a, b, alg).has_value();
}

bool is_winning(std::optional<Strategy> const& h, RelStructure const& a, RelStructure const& b,
                FiniteAlgebra const& alg) {
  return h && is_winning(*h, a, b, alg);
}

Carrier carrier_of(Strategy const& h, std::size_t key, FiniteAlgebra const& alg) {
  return Carrier(alg, h.index_set(key).size(), h.at(key).tuples());
}

std::vector<Element> singleton_coordinates(Strategy const& h) {
  std::vector<Element> out;
  for (Element a = 0; a < h.a_size(); ++a) {
    if (h.singleton(a).size() == 1) out.push_back(a);
  }
  return out;
}

std::vector<Element> extract_solution(Strategy const& h, RelStructure const& a,
                                      RelStructure const& b) {
  std::vector<Element> s(h.a_size());
  for (Element x = 0; x < h.a_size(); ++x) {
    auto const& hx = h.singleton(x);
    if (hx.size() != 1) {
      throw PreconditionError("coordinate " + std::to_string(x) + " is not a singleton");
    }
    s[x] = static_cast<Element>(hx.codes().front());
  }
  if (!is_homomorphism(s, a, b)) {
    throw InvariantViolation("singleton strategy does not yield a homomorphism");
  }
  return s;
}

}  // namespace cdw
