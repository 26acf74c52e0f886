#pragma once

// Finite relational structures, homomorphisms and polymorphisms.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdw/algebra.hpp"

namespace cdw {

// Relation symbol name -> arity. Names are unique by construction.
using Vocabulary = std::map<std::string, std::size_t>;

// A set of tuples over {0..universe-1}, kept sorted and deduplicated, with a
// bitset over tuple codes for O(1) membership.
class Relation {
 public:
  Relation() = default;
  // Throws InputError on arity 0, wrong tuple length or out-of-range entries.
  Relation(std::size_t universe, std::size_t arity, std::vector<Tuple> tuples);

  std::size_t arity() const noexcept { return arity_; }
  std::size_t universe() const noexcept { return universe_; }
  std::vector<Tuple> const& tuples() const noexcept { return tuples_; }
  std::size_t size() const noexcept { return tuples_.size(); }
  bool empty() const noexcept { return tuples_.empty(); }

  bool contains(std::span<Element const> t) const;

  friend bool operator==(Relation const& a, Relation const& b) {
    return a.arity_ == b.arity_ && a.universe_ == b.universe_ && a.tuples_ == b.tuples_;
  }

 private:
  std::size_t universe_ = 0;
  std::size_t arity_ = 0;
  std::vector<Tuple> tuples_;
  std::vector<bool> member_;
};

class RelStructure {
 public:
  RelStructure() = default;
  explicit RelStructure(std::size_t universe) : universe_(universe) {}

  std::size_t universe() const noexcept { return universe_; }
  // Replaces any relation of the same name. Throws InputError if the
  // relation's universe differs.
  void add(std::string name, Relation rel);
  Relation const& relation(std::string const& name) const;
  std::map<std::string, Relation> const& relations() const noexcept { return relations_; }
  Vocabulary vocabulary() const;
  std::size_t max_arity() const;

  friend bool operator==(RelStructure const&, RelStructure const&) = default;

 private:
  std::size_t universe_ = 0;
  std::map<std::string, Relation> relations_;
};

// Partial map from the instance universe; unset entries are outside the domain.
using Assignment = std::vector<std::optional<Element>>;

Assignment total_assignment(std::vector<Element> const& values);

// Throws InputError if the vocabularies differ (by name and arity).
void require_same_vocabulary(RelStructure const& a, RelStructure const& b);

// Throws InputError unless h is total on A.
bool is_homomorphism(std::vector<Element> const& h, RelStructure const& a, RelStructure const& b);
bool is_partial_homomorphism(Assignment const& f, RelStructure const& a, RelStructure const& b);

// Throws InputError on a size mismatch.
bool is_polymorphism(OperationTable const& op, RelStructure const& b);
bool is_polymorphism(OperationTable const& op, Relation const& rel);
// All three operations preserve every relation of b.
bool preserved_by(FiniteAlgebra const& alg, RelStructure const& b);

// The least relation containing rel that every operation of alg preserves.
// Throws InputError for an empty relation.
Relation inv_close_relation(Relation const& rel, FiniteAlgebra const& alg);

}  // namespace cdw
