#pragma once

// Finite idempotent algebras in the signature (p1, p2, p3): operation tables,
// terms, subuniverses of powers and congruences.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace cdw {

using Element = std::uint32_t;

// An element of a finite power A^m. Operations act coordinatewise.
using Tuple = std::vector<Element>;

// Default cap on universe sizes for anything that enumerates congruences.
inline constexpr std::size_t kDefaultEnumerationBound = 8;

class OperationTable {
 public:
  OperationTable() = default;
  // Throws InputError unless table.size() == size^arity and every entry < size.
  OperationTable(std::size_t arity, std::size_t size, std::vector<Element> table);

  template <typename F>
  static OperationTable from_function(std::size_t arity, std::size_t size, F&& f) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < arity; ++i) total *= size;
    std::vector<Element> table(total);
    Tuple args(arity, 0);
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t rest = code;
      for (std::size_t i = arity; i-- > 0;) {
        args[i] = static_cast<Element>(rest % size);
        rest /= size;
      }
      table[code] = f(std::span<Element const>(args));
    }
    return OperationTable(arity, size, std::move(table));
  }

  std::size_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return size_; }
  std::vector<Element> const& table() const noexcept { return table_; }

  // Checked evaluation; throws InputError on wrong arity or range.
  Element operator()(std::span<Element const> args) const;

  // Unchecked binary fast path.
  Element at(Element x, Element y) const noexcept { return table_[x * size_ + y]; }

  // Unchecked ternary fast path.
  Element at(Element x, Element y, Element z) const noexcept {
    return table_[x * stride_[0] + y * stride_[1] + z];
  }

  bool is_idempotent() const;

  friend bool operator==(OperationTable const&, OperationTable const&) = default;

 private:
  std::size_t arity_ = 0;
  std::size_t size_ = 0;
  std::array<std::size_t, 2> stride_{0, 0};
  std::vector<Element> table_;
};

Element eval_op(OperationTable const& op, std::span<Element const> args);

enum class Op : std::uint8_t { p1 = 0, p2 = 1, p3 = 2 };
inline constexpr std::array<Op, 3> kOps{Op::p1, Op::p2, Op::p3};
char const* op_name(Op op) noexcept;

class FiniteAlgebra;
FiniteAlgebra certify_cd4(FiniteAlgebra alg);

class FiniteAlgebra {
 public:
  FiniteAlgebra() = default;
  // Throws InputError unless all three tables are ternary, share a size and
  // are idempotent.
  FiniteAlgebra(OperationTable p1, OperationTable p2, OperationTable p3);

  // The algebra on {0..size-1} where all three operations equal f.
  template <typename F>
  static FiniteAlgebra uniform(std::size_t size, F&& f) {
    auto table = OperationTable::from_function(
        3, size, [&](std::span<Element const> a) { return f(a[0], a[1], a[2]); });
    return FiniteAlgebra(table, table, table);
  }

  std::size_t size() const noexcept { return size_; }
  OperationTable const& op(Op which) const noexcept {
    return ops_[static_cast<std::size_t>(which)];
  }
  Element apply(Op which, Element x, Element y, Element z) const noexcept {
    return ops_[static_cast<std::size_t>(which)].at(x, y, z);
  }
  Tuple apply(Op which, Tuple const& x, Tuple const& y, Tuple const& z) const;

  // Set only by certify_cd4 once the Jonsson identities have been checked.
  bool verified() const noexcept { return verified_; }

  friend bool operator==(FiniteAlgebra const& a, FiniteAlgebra const& b) {
    return a.ops_ == b.ops_;
  }

 private:
  friend FiniteAlgebra certify_cd4(FiniteAlgebra alg);

  std::size_t size_ = 0;
  std::array<OperationTable, 3> ops_;
  bool verified_ = false;
};

FiniteAlgebra majority_algebra(std::size_t size = 2);
FiniteAlgebra trivial_algebra();

// Terms over {p1, p2, p3}. Nodes are shared and immutable.
class TermExpr {
 public:
  TermExpr() = default;
  static TermExpr variable(std::size_t index);
  static TermExpr apply(Op op, TermExpr a, TermExpr b, TermExpr c);

  bool empty() const noexcept { return root_ == nullptr; }
  // One more than the largest variable index occurring in the term.
  std::size_t variable_count() const;
  std::size_t depth() const;

  friend Element eval_term(TermExpr const& t, FiniteAlgebra const& alg,
                           std::span<Element const> args);

 private:
  struct Node {
    bool leaf = true;
    std::size_t var = 0;
    Op op = Op::p1;
    std::array<std::shared_ptr<Node const>, 3> kids;
  };
  explicit TermExpr(std::shared_ptr<Node const> n) : root_(std::move(n)) {}
  std::shared_ptr<Node const> root_;
};

// Throws InputError for an empty term or too few arguments.
Element eval_term(TermExpr const& t, FiniteAlgebra const& alg, std::span<Element const> args);

// Least subset of A^power containing seed and closed under coordinatewise
// p1, p2, p3. Result is sorted.
std::vector<Tuple> sg_closure(FiniteAlgebra const& alg, std::size_t power,
                              std::vector<Tuple> const& seed);

bool is_subuniverse(FiniteAlgebra const& alg, std::vector<Element> const& subset);

// The subalgebra on `universe` (sorted, closed), relabelled to 0..s-1 in order.
FiniteAlgebra subalgebra(FiniteAlgebra const& alg, std::vector<Element> const& universe);

// a x b with the pair (x, y) numbered x * |b| + y.
FiniteAlgebra product_algebra(FiniteAlgebra const& a, FiniteAlgebra const& b);

class Congruence {
 public:
  Congruence() = default;
  // Canonicalises arbitrary labels to first-occurrence block ids.
  explicit Congruence(std::vector<std::uint32_t> labels);

  static Congruence identity(std::size_t n);
  static Congruence full(std::size_t n);

  std::size_t size() const noexcept { return block_.size(); }
  std::size_t block_count() const noexcept { return blocks_; }
  std::uint32_t block_of(Element x) const { return block_.at(x); }
  bool related(Element x, Element y) const { return block_.at(x) == block_.at(y); }
  std::vector<std::uint32_t> const& block_ids() const noexcept { return block_; }
  std::vector<std::vector<Element>> blocks() const;

  bool is_identity() const noexcept { return blocks_ == block_.size(); }
  bool is_full() const noexcept { return blocks_ <= 1; }
  bool leq(Congruence const& other) const;

  Congruence join(Congruence const& other) const;
  Congruence meet(Congruence const& other) const;

  friend auto operator<=>(Congruence const& a, Congruence const& b) {
    return a.block_ <=> b.block_;
  }
  friend bool operator==(Congruence const& a, Congruence const& b) {
    return a.block_ == b.block_;
  }

 private:
  std::vector<std::uint32_t> block_;
  std::size_t blocks_ = 0;
};

// Compatibility with p1, p2, p3, checked over all related argument triples.
bool is_compatible(FiniteAlgebra const& alg, Congruence const& theta);

Congruence principal_congruence(FiniteAlgebra const& alg, Element a, Element b);

// Every congruence, sorted by block-id vector. Throws ResourceError when
// alg.size() > bound.
std::vector<Congruence> all_congruences(FiniteAlgebra const& alg,
                                        std::size_t bound = kDefaultEnumerationBound);

struct Coatoms {
  std::vector<Congruence> congruences;  // sorted
  bool degenerate = false;              // one-element algebra
};
Coatoms coatom_congruences(FiniteAlgebra const& alg,
                           std::size_t bound = kDefaultEnumerationBound);

bool is_simple(FiniteAlgebra const& alg, std::size_t bound = kDefaultEnumerationBound);

// Universe = blocks of theta numbered by block id. Throws InvariantViolation
// if theta is not compatible.
FiniteAlgebra quotient_algebra(FiniteAlgebra const& alg, Congruence const& theta);

// Partition of the domain by equal image.
Congruence kernel(std::span<Element const> map);
// As above, and throws InvariantViolation if the partition is not a
// congruence of alg (the map was not a homomorphism).
Congruence kernel(FiniteAlgebra const& alg, std::span<Element const> map);

bool is_subdirect_binary(std::span<std::pair<Element, Element> const> relation, std::size_t n1,
                         std::size_t n2);

}  // namespace cdw
