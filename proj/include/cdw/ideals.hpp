#pragma once

// l-ideals and r-ideals of finite algebras given as explicit subuniverses of
// a power. A subset C is an l-ideal of D if it is a subuniverse and
// l(x,y) = p2(y,x,x) lies in C whenever x is in C and y in D; r-ideals use
// r(x,y) = p2(x,x,y).

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cdw/algebra.hpp"

namespace cdw {

enum class IdealSide : std::uint8_t { L, R };
inline constexpr std::array<IdealSide, 2> kSides{IdealSide::L, IdealSide::R};
char const* side_name(IdealSide side) noexcept;

// Sorted indices into a Carrier's element list.
using ElementSet = std::vector<std::size_t>;

// A subuniverse of alg^power, stored as a sorted element list. Elements are
// addressed by their index in that list so base elements and power tuples
// share one code path.
class Carrier {
 public:
  // alg itself, with 1-tuples as elements.
  explicit Carrier(FiniteAlgebra const& alg);
  // Throws InputError if the elements are not closed under p1, p2, p3.
  Carrier(FiniteAlgebra const& alg, std::size_t power, std::vector<Tuple> elements);

  std::size_t size() const noexcept { return elements_.size(); }
  std::size_t power() const noexcept { return power_; }
  FiniteAlgebra const& algebra() const noexcept { return alg_; }
  Tuple const& element(std::size_t i) const { return elements_.at(i); }
  std::vector<Tuple> const& elements() const noexcept { return elements_; }
  std::optional<std::size_t> index_of(Tuple const& t) const;

  std::size_t apply(Op op, std::size_t x, std::size_t y, std::size_t z) const {
    if (!tables_.empty()) return tables_[static_cast<std::size_t>(op)][(x * size() + y) * size() + z];
    return compute(op, x, y, z);
  }
  std::size_t side_op(IdealSide side, std::size_t x, std::size_t y) const {
    return (side == IdealSide::L ? l_ : r_)[x * size() + y];
  }

  ElementSet all() const;

 private:
  std::size_t compute(Op op, std::size_t x, std::size_t y, std::size_t z) const;
  std::uint64_t encode(Tuple const& t) const;

  FiniteAlgebra alg_;
  std::size_t power_ = 1;
  std::vector<Tuple> elements_;
  std::vector<std::int32_t> dense_index_;
  std::unordered_map<std::uint64_t, std::size_t> sparse_index_;
  std::vector<std::vector<std::uint32_t>> tables_;  // p1, p2, p3 when small enough
  std::vector<std::size_t> l_, r_;
};

bool is_subuniverse(Carrier const& d, ElementSet const& c);

// Throws InputError for an empty or out-of-range C.
bool is_ideal(Carrier const& d, ElementSet const& c, IdealSide side);

// Least ideal containing seed.
ElementSet ideal_closure(Carrier const& d, ElementSet const& seed, IdealSide side);
ElementSet sg_closure(Carrier const& d, ElementSet const& seed);

// True iff the ideal generated by a has no proper sub-ideal.
bool generates_minimal_ideal(Carrier const& d, std::size_t a, IdealSide side);

// Membership flags for every element that generates a minimal ideal, i.e.
// the union of all minimal ideals.
std::vector<bool> minimal_ideal_generators(Carrier const& d, IdealSide side);

// Any ideal contains the principal ideal of each of its elements, so it is
// enough to check that every principal ideal on both sides is everything.
bool is_ideal_free(Carrier const& d);

struct ProperIdeal {
  ElementSet elements;
  IdealSide side;
  std::size_t generator;
};

// A principal ideal != D, minimal under inclusion among those. Ties go to the
// smallest generator, then L before R, then (size, lexicographic).
std::optional<ProperIdeal> find_proper_ideal(Carrier const& d);

// For a subuniverse X that is not a side-ideal: some x in X, x' outside X
// with side_op(x, x') = x'. Absent only if no such pair exists. Throws
// PreconditionError if X is an ideal or not a subuniverse.
std::optional<std::pair<std::size_t, std::size_t>> absorption_witness(Carrier const& d,
                                                                      ElementSet const& x,
                                                                      IdealSide side);

}  // namespace cdw
