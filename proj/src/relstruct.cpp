#include "cdw/relstruct.hpp"

#include <algorithm>

#include "cdw/error.hpp"

namespace cdw {

namespace {

constexpr std::uint64_t kMaxRelationCodes = std::uint64_t{1} << 28;

}  // namespace

Relation::Relation(std::size_t universe, std::size_t arity, std::vector<Tuple> tuples)
    : universe_(universe), arity_(arity), tuples_(std::move(tuples)) {
  if (arity_ == 0) throw InputError("relation arity must be at least 1");
  std::uint64_t codes = 1;
  for (std::size_t i = 0; i < arity_; ++i) {
    codes *= universe_;
    if (codes > kMaxRelationCodes) throw InputError("relation too large to index");
  }
  member_.assign(codes, false);
  for (auto const& t : tuples_) {
    if (t.size() != arity_) throw InputError("relation tuple has the wrong arity");
    std::uint64_t code = 0;
    for (auto v : t) {
      if (v >= universe_) throw InputError("relation tuple entry out of range");
      code = code * universe_ + v;
    }
    member_[code] = true;
  }
  std::sort(tuples_.begin(), tuples_.end());
  tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
}

bool Relation::contains(std::span<Element const> t) const {
  if (t.size() != arity_) return false;
  std::uint64_t code = 0;
  for (auto v : t) {
    if (v >= universe_) return false;
    code = code * universe_ + v;
  }
  return member_[code];
}

void RelStructure::add(std::string name, Relation rel) {
  if (rel.universe() != universe_) throw InputError("relation universe differs from structure");
  relations_.insert_or_assign(std::move(name), std::move(rel));
}

Relation const& RelStructure::relation(std::string const& name) const {
  auto it = relations_.find(name);
  if (it == relations_.end()) throw InputError("no relation named " + name);
  return it->second;
}

Vocabulary RelStructure::vocabulary() const {
  Vocabulary v;
  for (auto const& [name, rel] : relations_) v.emplace(name, rel.arity());
  return v;
}

std::size_t RelStructure::max_arity() const {
  std::size_t best = 0;
  for (auto const& [name, rel] : relations_) best = std::max(best, rel.arity());
  return best;
}

Assignment total_assignment(std::vector<Element> const& values) {
  return Assignment(values.begin(), values.end());
}

void require_same_vocabulary(RelStructure const& a, RelStructure const& b) {
  if (a.vocabulary() != b.vocabulary()) {
    throw InputError("instance and template have different vocabularies");
  }
}

bool is_homomorphism(std::vector<Element> const& h, RelStructure const& a, RelStructure const& b) {
  require_same_vocabulary(a, b);
  if (h.size() != a.universe()) throw InputError("homomorphism must be total on the instance");
  for (auto v : h) {
    if (v >= b.universe()) throw InputError("homomorphism value out of range");
  }
  Tuple image;
  for (auto const& [name, rel] : a.relations()) {
    auto const& target = b.relation(name);
    for (auto const& t : rel.tuples()) {
      image.resize(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) image[i] = h[t[i]];
      if (!target.contains(image)) return false;
    }
  }
  return true;
}

bool is_partial_homomorphism(Assignment const& f, RelStructure const& a, RelStructure const& b) {
  require_same_vocabulary(a, b);
  if (f.size() != a.universe()) throw InputError("assignment length differs from instance");
  Tuple image;
  for (auto const& [name, rel] : a.relations()) {
    auto const& target = b.relation(name);
    for (auto const& t : rel.tuples()) {
      image.resize(t.size());
      bool inside = true;
      for (std::size_t i = 0; i < t.size() && inside; ++i) {
        if (!f[t[i]]) {
          inside = false;
        } else {
          image[i] = *f[t[i]];
        }
      }
      if (inside && !target.contains(image)) return false;
    }
  }
  return true;
}

bool is_polymorphism(OperationTable const& op, Relation const& rel) {
  if (op.size() != rel.universe()) throw InputError("operation and relation sizes differ");
  auto const& tuples = rel.tuples();
  if (tuples.empty()) return true;
  auto const m = tuples.size();
  auto const arity = op.arity();
  // Odometer over arity-many tuple choices.
  std::vector<std::size_t> pick(arity, 0);
  Tuple args(arity), image(rel.arity());
  while (true) {
    for (std::size_t c = 0; c < rel.arity(); ++c) {
      for (std::size_t j = 0; j < arity; ++j) args[j] = tuples[pick[j]][c];
      image[c] = op(args);
    }
    if (!rel.contains(image)) return false;
    std::size_t j = 0;
    while (j < arity && ++pick[j] == m) pick[j++] = 0;
    if (j == arity) break;
  }
  return true;
}

bool is_polymorphism(OperationTable const& op, RelStructure const& b) {
  if (op.size() != b.universe()) throw InputError("operation and structure sizes differ");
  return std::all_of(b.relations().begin(), b.relations().end(),
                     [&](auto const& kv) { return is_polymorphism(op, kv.second); });
}

bool preserved_by(FiniteAlgebra const& alg, RelStructure const& b) {
  return std::all_of(kOps.begin(), kOps.end(),
                     [&](Op op) { return is_polymorphism(alg.op(op), b); });
}

Relation inv_close_relation(Relation const& rel, FiniteAlgebra const& alg) {
  if (rel.empty()) throw InputError("cannot close an empty relation");
  if (rel.universe() != alg.size()) throw InputError("algebra and relation sizes differ");
  return Relation(rel.universe(), rel.arity(), sg_closure(alg, rel.arity(), rel.tuples()));
}

}  // namespace cdw
