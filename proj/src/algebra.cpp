#include "cdw/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <unordered_set>

#include "cdw/error.hpp"

namespace cdw {

namespace {

std::size_t checked_power(std::size_t base, std::size_t exp) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && total > (std::size_t{1} << 40) / base) {
      throw InputError("operation table too large");
    }
    total *= base;
  }
  return total;
}

// Union-find over a small universe.
class Dsu {
 public:
  explicit Dsu(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }
  Congruence to_congruence() {
    std::vector<std::uint32_t> labels(parent_.size());
    for (std::size_t i = 0; i < parent_.size(); ++i) {
      labels[i] = static_cast<std::uint32_t>(find(i));
    }
    return Congruence(std::move(labels));
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

// ---------------------------------------------------------------------------
// OperationTable
// ---------------------------------------------------------------------------

OperationTable::OperationTable(std::size_t arity, std::size_t size, std::vector<Element> table)
    : arity_(arity), size_(size), table_(std::move(table)) {
  if (arity == 0) throw InputError("operation arity must be at least 1");
  if (size == 0) throw InputError("operation universe must be nonempty");
  if (table_.size() != checked_power(size, arity)) {
    throw InputError("operation table has length " + std::to_string(table_.size()) +
                     ", expected " + std::to_string(checked_power(size, arity)));
  }
  for (auto v : table_) {
    if (v >= size) throw InputError("operation table entry out of range");
  }
  if (arity == 3) {
    stride_ = {size * size, size};
  } else if (arity == 2) {
    stride_ = {0, size};
  }
}

Element OperationTable::operator()(std::span<Element const> args) const {
  if (args.size() != arity_) {
    throw InputError("expected " + std::to_string(arity_) + " arguments, got " +
                     std::to_string(args.size()));
  }
  std::size_t code = 0;
  for (auto a : args) {
    if (a >= size_) throw InputError("argument out of range");
    code = code * size_ + a;
  }
  return table_[code];
}

bool OperationTable::is_idempotent() const {
  Tuple args(arity_);
  for (std::size_t x = 0; x < size_; ++x) {
    std::fill(args.begin(), args.end(), static_cast<Element>(x));
    if ((*this)(args) != x) return false;
  }
  return true;
}

Element eval_op(OperationTable const& op, std::span<Element const> args) { return op(args); }

char const* op_name(Op op) noexcept {
  switch (op) {
    case Op::p1:
      return "p1";
    case Op::p2:
      return "p2";
    case Op::p3:
      return "p3";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// FiniteAlgebra
// ---------------------------------------------------------------------------

FiniteAlgebra::FiniteAlgebra(OperationTable p1, OperationTable p2, OperationTable p3)
    : size_(p1.size()), ops_{std::move(p1), std::move(p2), std::move(p3)} {
  for (auto const& op : ops_) {
    if (op.arity() != 3) throw InputError("operations must be ternary");
    if (op.size() != size_) throw InputError("operation tables disagree on universe size");
    if (!op.is_idempotent()) throw InputError("operations must be idempotent");
  }
}

Tuple FiniteAlgebra::apply(Op which, Tuple const& x, Tuple const& y, Tuple const& z) const {
  Tuple out(x.size());
  auto const& t = op(which);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = t.at(x[i], y[i], z[i]);
  return out;
}

FiniteAlgebra majority_algebra(std::size_t size) {
  return FiniteAlgebra::uniform(size, [](Element x, Element y, Element z) {
    if (y == z) return y;
    return x;
  });
}

FiniteAlgebra trivial_algebra() { return majority_algebra(1); }

// ---------------------------------------------------------------------------
// TermExpr
// ---------------------------------------------------------------------------

TermExpr TermExpr::variable(std::size_t index) {
  auto n = std::make_shared<Node>();
  n->leaf = true;
  n->var = index;
  return TermExpr(std::move(n));
}

TermExpr TermExpr::apply(Op op, TermExpr a, TermExpr b, TermExpr c) {
  if (a.empty() || b.empty() || c.empty()) throw InputError("term has an empty subterm");
  auto n = std::make_shared<Node>();
  n->leaf = false;
  n->op = op;
  n->kids = {std::move(a.root_), std::move(b.root_), std::move(c.root_)};
  return TermExpr(std::move(n));
}

std::size_t TermExpr::variable_count() const {
  if (!root_) return 0;
  std::size_t best = 0;
  std::vector<Node const*> stack{root_.get()};
  while (!stack.empty()) {
    auto const* n = stack.back();
    stack.pop_back();
    if (n->leaf) {
      best = std::max(best, n->var + 1);
    } else {
      for (auto const& k : n->kids) stack.push_back(k.get());
    }
  }
  return best;
}

std::size_t TermExpr::depth() const {
  struct Rec {
    static std::size_t go(Node const* n) {
      if (n->leaf) return 0;
      std::size_t d = 0;
      for (auto const& k : n->kids) d = std::max(d, go(k.get()));
      return d + 1;
    }
  };
  return root_ ? Rec::go(root_.get()) : 0;
}

Element eval_term(TermExpr const& t, FiniteAlgebra const& alg, std::span<Element const> args) {
  if (t.empty()) throw InputError("cannot evaluate an empty term");
  if (t.variable_count() > args.size()) {
    throw InputError("term uses more variables than arguments supplied");
  }
  for (auto a : args) {
    if (a >= alg.size()) throw InputError("term argument out of range");
  }
  struct Rec {
    static Element go(TermExpr::Node const* n, FiniteAlgebra const& alg,
                      std::span<Element const> args) {
      if (n->leaf) return args[n->var];
      return alg.apply(n->op, go(n->kids[0].get(), alg, args), go(n->kids[1].get(), alg, args),
                       go(n->kids[2].get(), alg, args));
    }
  };
  return Rec::go(t.root_.get(), alg, args);
}

// ---------------------------------------------------------------------------
// Subuniverses
// ---------------------------------------------------------------------------

std::vector<Tuple> sg_closure(FiniteAlgebra const& alg, std::size_t power,
                              std::vector<Tuple> const& seed) {
  if (seed.empty()) throw InputError("sg_closure needs a nonempty seed");
  for (auto const& t : seed) {
    if (t.size() != power) throw InputError("seed tuple has the wrong length");
    for (auto v : t) {
      if (v >= alg.size()) throw InputError("seed tuple entry out of range");
    }
  }
  std::set<Tuple> seen;
  std::vector<Tuple> members;
  for (auto const& t : seed) {
    if (seen.insert(t).second) members.push_back(t);
  }
  // Each triple is evaluated once, when its largest index is processed.
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t a = 0; a <= i; ++a) {
      for (std::size_t b = 0; b <= i; ++b) {
        std::array<std::array<std::size_t, 3>, 3> const shapes{
            {{i, a, b}, {a, i, b}, {a, b, i}}};
        for (auto const& s : shapes) {
          for (auto op : kOps) {
            auto t = alg.apply(op, members[s[0]], members[s[1]], members[s[2]]);
            if (seen.insert(t).second) members.push_back(std::move(t));
          }
        }
      }
    }
  }
  return {seen.begin(), seen.end()};
}

bool is_subuniverse(FiniteAlgebra const& alg, std::vector<Element> const& subset) {
  std::vector<bool> in(alg.size(), false);
  for (auto x : subset) in.at(x) = true;
  for (auto x : subset) {
    for (auto y : subset) {
      for (auto z : subset) {
        for (auto op : kOps) {
          if (!in[alg.apply(op, x, y, z)]) return false;
        }
      }
    }
  }
  return true;
}

FiniteAlgebra subalgebra(FiniteAlgebra const& alg, std::vector<Element> const& universe) {
  if (universe.empty()) throw InputError("subalgebra universe must be nonempty");
  std::vector<std::int64_t> local(alg.size(), -1);
  for (std::size_t i = 0; i < universe.size(); ++i) local.at(universe[i]) = static_cast<std::int64_t>(i);
  std::array<OperationTable, 3> tables;
  for (auto op : kOps) {
    tables[static_cast<std::size_t>(op)] = OperationTable::from_function(
        3, universe.size(), [&](std::span<Element const> a) {
          auto v = local[alg.apply(op, universe[a[0]], universe[a[1]], universe[a[2]])];
          if (v < 0) throw InputError("subalgebra universe is not closed");
          return static_cast<Element>(v);
        });
  }
  return FiniteAlgebra(tables[0], tables[1], tables[2]);
}

FiniteAlgebra product_algebra(FiniteAlgebra const& a, FiniteAlgebra const& b) {
  auto const nb = b.size();
  std::array<OperationTable, 3> tables;
  for (auto op : kOps) {
    tables[static_cast<std::size_t>(op)] = OperationTable::from_function(
        3, a.size() * nb, [&](std::span<Element const> x) {
          auto first = a.apply(op, x[0] / nb, x[1] / nb, x[2] / nb);
          auto second = b.apply(op, x[0] % nb, x[1] % nb, x[2] % nb);
          return static_cast<Element>(first * nb + second);
        });
  }
  return FiniteAlgebra(tables[0], tables[1], tables[2]);
}

// ---------------------------------------------------------------------------
// Congruences
// ---------------------------------------------------------------------------

Congruence::Congruence(std::vector<std::uint32_t> labels) : block_(labels.size()) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find_if(seen.begin(), seen.end(),
                           [&](auto const& p) { return p.first == labels[i]; });
    if (it == seen.end()) {
      seen.emplace_back(labels[i], static_cast<std::uint32_t>(seen.size()));
      block_[i] = seen.back().second;
    } else {
      block_[i] = it->second;
    }
  }
  blocks_ = seen.size();
}

Congruence Congruence::identity(std::size_t n) {
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return Congruence(std::move(ids));
}

Congruence Congruence::full(std::size_t n) { return Congruence(std::vector<std::uint32_t>(n, 0)); }

std::vector<std::vector<Element>> Congruence::blocks() const {
  std::vector<std::vector<Element>> out(blocks_);
  for (std::size_t i = 0; i < block_.size(); ++i) out[block_[i]].push_back(static_cast<Element>(i));
  return out;
}

bool Congruence::leq(Congruence const& other) const {
  if (other.size() != size()) throw InputError("congruences on different universes");
  // Every block of *this must sit inside a block of other.
  for (std::size_t i = 0; i < block_.size(); ++i) {
    for (std::size_t j = i + 1; j < block_.size(); ++j) {
      if (block_[i] == block_[j] && other.block_[i] != other.block_[j]) return false;
    }
  }
  return true;
}

Congruence Congruence::join(Congruence const& other) const {
  if (other.size() != size()) throw InputError("congruences on different universes");
  Dsu dsu(size());
  for (auto const* c : {this, &other}) {
    std::vector<std::size_t> first(c->blocks_, size());
    for (std::size_t i = 0; i < size(); ++i) {
      auto& f = first[c->block_[i]];
      if (f == size()) {
        f = i;
      } else {
        dsu.unite(f, i);
      }
    }
  }
  return dsu.to_congruence();
}

Congruence Congruence::meet(Congruence const& other) const {
  if (other.size() != size()) throw InputError("congruences on different universes");
  std::vector<std::uint32_t> labels(size());
  for (std::size_t i = 0; i < size(); ++i) {
    labels[i] = block_[i] * static_cast<std::uint32_t>(other.blocks_ + 1) + other.block_[i];
  }
  return Congruence(std::move(labels));
}

bool is_compatible(FiniteAlgebra const& alg, Congruence const& theta) {
  auto const n = alg.size();
  if (theta.size() != n) throw InputError("congruence size does not match algebra");
  // Changing one argument at a time within its block suffices.
  for (auto op : kOps) {
    for (Element x = 0; x < n; ++x) {
      for (Element y = 0; y < n; ++y) {
        for (Element z = 0; z < n; ++z) {
          auto v = alg.apply(op, x, y, z);
          for (Element w = 0; w < n; ++w) {
            if (theta.related(x, w) && !theta.related(v, alg.apply(op, w, y, z))) return false;
            if (theta.related(y, w) && !theta.related(v, alg.apply(op, x, w, z))) return false;
            if (theta.related(z, w) && !theta.related(v, alg.apply(op, x, y, w))) return false;
          }
        }
      }
    }
  }
  return true;
}

Congruence principal_congruence(FiniteAlgebra const& alg, Element a, Element b) {
  auto const n = alg.size();
  if (a >= n || b >= n) throw InputError("principal_congruence argument out of range");
  Dsu dsu(n);
  // Close {(a,b)} under basic translations; the equivalence generated by the
  // translation-closed set of pairs is the principal congruence.
  std::vector<bool> visited(n * n, false);
  std::vector<std::pair<Element, Element>> work;
  auto push = [&](Element x, Element y) {
    if (x == y) return;
    if (x > y) std::swap(x, y);
    if (visited[x * n + y]) return;
    visited[x * n + y] = true;
    work.emplace_back(x, y);
  };
  push(a, b);
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    dsu.unite(x, y);
    for (auto op : kOps) {
      for (Element c = 0; c < n; ++c) {
        for (Element d = 0; d < n; ++d) {
          push(alg.apply(op, x, c, d), alg.apply(op, y, c, d));
          push(alg.apply(op, c, x, d), alg.apply(op, c, y, d));
          push(alg.apply(op, c, d, x), alg.apply(op, c, d, y));
        }
      }
    }
  }
  return dsu.to_congruence();
}

std::vector<Congruence> all_congruences(FiniteAlgebra const& alg, std::size_t bound) {
  auto const n = alg.size();
  if (n > bound) {
    throw ResourceError("congruence enumeration bound exceeded: size " + std::to_string(n) +
                        " > " + std::to_string(bound));
  }
  std::set<Congruence> all{Congruence::identity(n)};
  std::vector<Congruence> principal;
  for (Element a = 0; a < n; ++a) {
    for (Element b = a + 1; b < n; ++b) principal.push_back(principal_congruence(alg, a, b));
  }
  // Every congruence is a join of principal ones.
  std::vector<Congruence> frontier(principal.begin(), principal.end());
  for (auto const& c : principal) all.insert(c);
  while (!frontier.empty()) {
    std::vector<Congruence> next;
    for (auto const& f : frontier) {
      for (auto const& p : principal) {
        auto j = f.join(p);
        if (all.insert(j).second) next.push_back(j);
      }
    }
    frontier = std::move(next);
  }
  return {all.begin(), all.end()};
}

Coatoms coatom_congruences(FiniteAlgebra const& alg, std::size_t bound) {
  Coatoms out;
  if (alg.size() <= 1) {
    out.degenerate = true;
    return out;
  }
  auto all = all_congruences(alg, bound);
  std::vector<Congruence> proper;
  for (auto const& c : all) {
    if (!c.is_full()) proper.push_back(c);
  }
  for (auto const& c : proper) {
    bool maximal = std::none_of(proper.begin(), proper.end(), [&](Congruence const& d) {
      return d != c && c.leq(d);
    });
    if (maximal) out.congruences.push_back(c);
  }
  return out;
}

bool is_simple(FiniteAlgebra const& alg, std::size_t bound) {
  if (alg.size() < 2) return false;
  return all_congruences(alg, bound).size() == 2;
}

FiniteAlgebra quotient_algebra(FiniteAlgebra const& alg, Congruence const& theta) {
  if (!is_compatible(alg, theta)) {
    throw InvariantViolation("quotient by a relation that is not a congruence");
  }
  auto reps = theta.blocks();
  std::array<OperationTable, 3> tables;
  for (auto op : kOps) {
    tables[static_cast<std::size_t>(op)] = OperationTable::from_function(
        3, reps.size(), [&](std::span<Element const> a) {
          return static_cast<Element>(
              theta.block_of(alg.apply(op, reps[a[0]][0], reps[a[1]][0], reps[a[2]][0])));
        });
  }
  return FiniteAlgebra(tables[0], tables[1], tables[2]);
}

Congruence kernel(std::span<Element const> map) {
  return Congruence(std::vector<std::uint32_t>(map.begin(), map.end()));
}

Congruence kernel(FiniteAlgebra const& alg, std::span<Element const> map) {
  if (map.size() != alg.size()) throw InputError("kernel map must be total");
  auto k = kernel(map);
  if (!is_compatible(alg, k)) {
    throw InvariantViolation("kernel of the map is not a congruence");
  }
  return k;
}

bool is_subdirect_binary(std::span<std::pair<Element, Element> const> relation, std::size_t n1,
                         std::size_t n2) {
  std::vector<bool> left(n1, false), right(n2, false);
  for (auto [a, b] : relation) {
    if (a >= n1 || b >= n2) throw InputError("pair out of range");
    left[a] = true;
    right[b] = true;
  }
  return std::all_of(left.begin(), left.end(), [](bool v) { return v; }) &&
         std::all_of(right.begin(), right.end(), [](bool v) { return v; });
}

}  // namespace cdw
