#pragma once

// The CD(4) Jonsson chain p0 = x, p1, p2, p3, p4 = z; the derived binary
// operations l(x,y) = p2(y,x,x) and r(x,y) = p2(x,x,y); and the iteration that
// replaces p1, p2, p3 by terms satisfying l(x,l(x,y)) = l(x,y) and
// r(x,r(x,y)) = r(x,y).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdw/algebra.hpp"

namespace cdw {

struct IdentityFailure {
  std::string identity;
  Tuple witness;
};

struct JonssonReport {
  bool ok = true;
  std::vector<IdentityFailure> failures;
};

// Exhaustive check of the CD(4) identities and idempotence. Throws
// InputError when the tables are not ternary or disagree on size.
JonssonReport verify_cd4(OperationTable const& p1, OperationTable const& p2,
                         OperationTable const& p3);
JonssonReport verify_cd4(FiniteAlgebra const& alg);

// Returns alg with its verified flag set; throws PreconditionError if
// verify_cd4 reports a failure.
FiniteAlgebra certify_cd4(FiniteAlgebra alg);

// l(x,y) = p2(y,x,x); also asserts p1(y,x,x) = l(x,y).
OperationTable derived_l(FiniteAlgebra const& alg);
// r(x,y) = p2(x,x,y); also asserts p3(x,x,y) = r(x,y).
OperationTable derived_r(FiniteAlgebra const& alg);

JonssonReport verify_lr_idempotence(FiniteAlgebra const& alg);

// A nonnegative exponent N kept as its exact value (while it fits in 64 bits)
// and N mod M, where M = lcm(1..n) is a common multiple of every cycle length
// of a self-map of an n-element set. f^N can then be evaluated for any N.
class ReducedExponent {
 public:
  explicit ReducedExponent(std::size_t universe, std::uint64_t value = 1);

  ReducedExponent& operator*=(std::uint64_t factor);
  // N - 1; requires N >= 1.
  ReducedExponent predecessor() const;

  // Exact value unless the product overflowed.
  std::optional<std::uint64_t> exact() const;
  bool is_zero() const { return saturated_ == 0; }

  // An exponent e <= n + M with f^e = f^N for every self-map f of the universe.
  std::uint64_t effective() const;

 private:
  std::uint64_t threshold_ = 0;  // n
  std::uint64_t modulus_ = 1;    // lcm(1..n)
  std::uint64_t saturated_ = 0;  // N while it fits in 64 bits
  std::uint64_t residue_ = 0;    // N mod modulus_
  bool overflowed_ = false;      // N >= 2^64, only residue_ is meaningful
};

using UnaryMap = std::vector<Element>;

UnaryMap compose(UnaryMap const& outer, UnaryMap const& inner);
UnaryMap map_power(UnaryMap const& f, std::uint64_t e);
UnaryMap map_power(UnaryMap const& f, ReducedExponent const& e);
// Least e >= 1 with f^(2e) = f^e.
std::uint64_t retraction_exponent(UnaryMap const& f);

struct PreprocessResult {
  FiniteAlgebra algebra;  // tables of p1', p2', p3', certified
  // Exponents n1 = prod n_x (over l_x) and n3 = prod n_x (over r_x); absent
  // when the product does not fit in 64 bits.
  std::optional<std::uint64_t> n1;
  std::optional<std::uint64_t> n3;
  std::vector<std::uint64_t> l_exponents;  // n_x for l_x, indexed by x
  std::vector<std::uint64_t> r_exponents;  // n_x for r_x, indexed by x
};

// Throws PreconditionError unless verify_cd4(alg) passes, and
// InvariantViolation if the output misses any required identity.
PreprocessResult preprocess_terms(FiniteAlgebra const& alg);

// q1^i as an explicit term: q1^0 = x, q1^(i+1) = q1^i(p1(x,y,z), y, z).
TermExpr q1_term(std::size_t i);
// q3^0 = z, q3^(i+1) = q3^i(x, y, p3(x,y,z)).
TermExpr q3_term(std::size_t i);

}  // namespace cdw
