#pragma once

// (k-1, k)-strategies in relation view: for every index set I of instance
// elements with 1 <= |I| <= k, H_I is the set of template tuples (f(a))_{a in I}
// over the partial homomorphisms f with domain I. Index sets are sorted, and
// tuples are coded in base |B| with the smallest element most significant.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cdw/algebra.hpp"
#include "cdw/ideals.hpp"
#include "cdw/relstruct.hpp"

namespace cdw {

using TupleCode = std::uint64_t;

// A subset of B^width as a bitset over tuple codes.
class TupleSet {
 public:
  TupleSet() = default;
  TupleSet(std::size_t width, std::size_t base);

  std::size_t width() const noexcept { return width_; }
  std::size_t base() const noexcept { return base_; }
  TupleCode space() const noexcept { return space_; }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  bool contains(TupleCode c) const { return (words_[c >> 6] >> (c & 63)) & 1U; }
  void insert(TupleCode c);
  void erase(TupleCode c);

  std::vector<TupleCode> codes() const;
  std::vector<Tuple> tuples() const;

  TupleCode encode(std::span<Element const> t) const;
  Tuple decode(TupleCode c) const;

  bool subset_of(TupleSet const& other) const;
  friend bool operator==(TupleSet const& a, TupleSet const& b) {
    return a.width_ == b.width_ && a.base_ == b.base_ && a.words_ == b.words_;
  }

 private:
  std::size_t width_ = 0;
  std::size_t base_ = 0;
  TupleCode space_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> words_;
};

class Strategy {
 public:
  // Cover pair I = J \ {J[position]} with |J| = |I| + 1.
  struct Cover {
    std::size_t small;
    std::size_t big;
    std::size_t position;
  };

  // All index sets up to size min(k, a_size), each with an empty tuple set.
  Strategy(std::size_t k, std::size_t a_size, std::size_t b_size);

  std::size_t k() const noexcept { return k_; }
  std::size_t a_size() const noexcept { return a_size_; }
  std::size_t b_size() const noexcept { return b_size_; }
  std::size_t key_count() const noexcept { return sets_.size(); }

  std::vector<Element> const& index_set(std::size_t key) const { return index_sets_.at(key); }
  // Throws InputError for unsorted, repeated, too large or out-of-range sets.
  std::size_t key_of(std::vector<Element> const& index_set) const;
  std::size_t singleton_key(Element a) const { return key_of({a}); }

  TupleSet const& at(std::size_t key) const { return sets_.at(key); }
  TupleSet& at(std::size_t key) { return sets_.at(key); }
  TupleSet const& singleton(Element a) const { return at(singleton_key(a)); }

  std::vector<Cover> const& covers() const noexcept { return covers_; }
  std::vector<std::size_t> const& covers_touching(std::size_t key) const {
    return touching_.at(key);
  }

  // Drops the digit at `position` from a code of the big set of a cover.
  TupleCode project(TupleCode code, std::size_t width, std::size_t position) const;

  // Values of H_{u,v} as (t(u), t(v)) pairs, for u != v.
  std::vector<std::pair<Element, Element>> pairs(Element u, Element v) const;
  std::vector<Element> values(Element a) const;

  // Sum over instance elements of |H_a|.
  std::size_t potential() const;

  friend bool operator==(Strategy const& a, Strategy const& b) {
    return a.k_ == b.k_ && a.a_size_ == b.a_size_ && a.b_size_ == b.b_size_ && a.sets_ == b.sets_;
  }

 private:
  std::size_t k_;
  std::size_t a_size_;
  std::size_t b_size_;
  std::vector<std::vector<Element>> index_sets_;
  std::unordered_map<std::uint64_t, std::size_t> key_by_mask_;
  std::vector<TupleSet> sets_;
  std::vector<Cover> covers_;
  std::vector<std::vector<std::size_t>> touching_;
  std::vector<TupleCode> pow_;  // b_size^i
};

// max(3, largest relation arity).
std::size_t choose_k(RelStructure const& a);

// H_I = all tuples that are partial homomorphisms on I.
Strategy init_full(RelStructure const& a, RelStructure const& b, std::size_t k);

struct EnforceOptions {
  // When set, pending cover pairs are processed in a seeded random order
  // instead of FIFO. The result must not depend on it.
  std::optional<std::uint64_t> shuffle_seed;
};

// Greatest sub-family with pi_I(H_J) = H_I for every cover I < J, or nullopt
// (no winning strategy) if some H_I empties.
std::optional<Strategy> enforce(Strategy h, EnforceOptions const& options = {});

// Reason the family is not a winning strategy in Inv(alg), or nullopt if it is.
std::optional<std::string> winning_violation(Strategy const& h, RelStructure const& a,
                                             RelStructure const& b, FiniteAlgebra const& alg);
bool is_winning(Strategy const& h, RelStructure const& a, RelStructure const& b,
                FiniteAlgebra const& alg);
bool is_winning(std::optional<Strategy> const& h, RelStructure const& a, RelStructure const& b,
                FiniteAlgebra const& alg);

// True if the tuple set is closed under coordinatewise p1, p2, p3.
bool is_closed(TupleSet const& s, FiniteAlgebra const& alg);

// H_key as an algebra (a subuniverse of B^|key|).
Carrier carrier_of(Strategy const& h, std::size_t key, FiniteAlgebra const& alg);

std::vector<Element> singleton_coordinates(Strategy const& h);
// Throws PreconditionError unless every H_a is a singleton, and
// InvariantViolation if the resulting map is not a homomorphism.
std::vector<Element> extract_solution(Strategy const& h, RelStructure const& a,
                                      RelStructure const& b);

}  // namespace cdw
