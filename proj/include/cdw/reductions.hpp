#pragma once

// Strategy reductions that shrink some H_a while keeping a winning strategy,
// and the solve loop that repeats them until every H_a is a singleton.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdw/algebra.hpp"
#include "cdw/error.hpp"
#include "cdw/ideals.hpp"
#include "cdw/relstruct.hpp"
#include "cdw/strategy.hpp"

namespace cdw {

// Coordinates M with a maximal congruence theta_m of each H_m and block
// bijections tau between the quotients. Congruences act on indices into the
// sorted value list of H_m.
struct Platoon {
  std::vector<Element> members;                        // sorted
  std::map<Element, std::vector<Element>> values;      // sorted H_m
  std::map<Element, Congruence> theta;                 // on indices of values[m]
  // tau[{m1, m2}][block of theta_m1] = block of theta_m2, for m1 != m2.
  std::map<std::pair<Element, Element>, std::vector<std::uint32_t>> tau;

  Element leader() const { return members.front(); }
  // Block index of value v under theta_m.
  std::uint32_t block_of(Element m, Element v) const;
  // tau_{m1,m2}, with tau_{m,m} the identity.
  std::vector<std::uint32_t> bijection(Element m1, Element m2) const;
};

// Lowest-indexed coatom, or nullopt for a one-element algebra.
std::optional<Congruence> canonical_coatom(FiniteAlgebra const& alg);

// Values of H_a as an algebra (1-tuples over B).
Carrier value_carrier(Strategy const& h, Element a, FiniteAlgebra const& alg);

// Keeps the functions with g(a) in X, then admits the size-k functions all of
// whose (k-1)-restrictions survived. Throws PreconditionError unless X is a
// proper side-ideal of H_a, and InvariantViolation if the result is not a
// winning strategy with H'_a = X.
Strategy ideal_reduce(Strategy const& h, Element a, std::vector<Element> const& x, IdealSide side,
                      RelStructure const& a_struct, RelStructure const& b_struct,
                      FiniteAlgebra const& alg);

// Greedy maximal platoon over the non-singleton coordinates. Statements (1)-(3)
// are verified before returning; a failure throws InvariantViolation.
Platoon find_platoon(Strategy const& h, FiniteAlgebra const& alg);

// Returns a reason if one of the three platoon statements fails.
std::optional<std::string> platoon_violation(Strategy const& h, Platoon const& p);

struct SimpleReduction {
  Strategy strategy;
  std::map<Element, std::vector<Element>> classes;  // C_m for m in M
};

// Restricts M to corresponding theta-classes and every H_K to the subalgebra
// generated by its minimal r-ideal generators. Throws InvariantViolation if
// some G_K is empty or the result is not a winning strategy inside H with
// G_m contained in C_m.
SimpleReduction simple_reduce(Strategy const& h, Platoon const& p, RelStructure const& a_struct,
                              RelStructure const& b_struct, FiniteAlgebra const& alg);

struct TraceStep {
  std::string kind;  // "enforce", "ideal_reduce" or "simple_reduce"
  std::optional<Element> coordinate;
  std::optional<IdealSide> side;
  std::size_t ideal_size = 0;
  std::vector<Element> platoon;
  std::vector<std::size_t> class_sizes;
  std::size_t potential = 0;
};

struct SolveTrace {
  std::size_t k = 0;
  std::vector<TraceStep> steps;
};

struct SolveOptions {
  // Skip the check that alg preserves the template relations.
  bool unchecked = false;
};

struct SolveResult {
  std::optional<std::vector<Element>> homomorphism;
  SolveTrace trace;
};

// Thrown from solve with the trace up to the failing step.
class SolveFailure : public InvariantViolation {
 public:
  SolveFailure(std::string const& what, SolveTrace trace)
      : InvariantViolation(what), trace_(std::move(trace)) {}
  SolveTrace const& trace() const noexcept { return trace_; }

 private:
  SolveTrace trace_;
};

// Throws InputError on vocabulary or size mismatches, PreconditionError if
// alg is not in CD(4) or (unless unchecked) does not preserve B, and
// SolveFailure on any invariant violation.
SolveResult solve(RelStructure const& a, RelStructure const& b, FiniteAlgebra const& alg,
                  SolveOptions const& options = {});

}  // namespace cdw
