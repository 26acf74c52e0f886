#include "cdw/jonsson.hpp"

#include <limits>
#include <numeric>
#include <set>

#include "cdw/error.hpp"

namespace cdw {

namespace {

void check_ternary_family(OperationTable const& p1, OperationTable const& p2,
                          OperationTable const& p3) {
  for (auto const* op : {&p1, &p2, &p3}) {
    if (op->arity() != 3) throw InputError("Jonsson operations must be ternary");
  }
  if (p1.size() != p2.size() || p2.size() != p3.size()) {
    throw InputError("Jonsson operations disagree on universe size");
  }
}

class ReportBuilder {
 public:
  void expect(bool holds, char const* identity, Tuple witness) {
    if (!holds) report_.failures.push_back({identity, std::move(witness)});
  }
  JonssonReport finish() {
    report_.ok = report_.failures.empty();
    return std::move(report_);
  }

 private:
  JonssonReport report_;
};

OperationTable binary_table(std::size_t n, std::vector<Element> values) {
  return OperationTable(2, n, std::move(values));
}

}  // namespace

JonssonReport verify_cd4(OperationTable const& p1, OperationTable const& p2,
                         OperationTable const& p3) {
  check_ternary_family(p1, p2, p3);
  auto const n = static_cast<Element>(p1.size());
  ReportBuilder rb;
  for (Element x = 0; x < n; ++x) {
    rb.expect(p1.at(x, x, x) == x, "p1(x,x,x)=x", {x});
    rb.expect(p2.at(x, x, x) == x, "p2(x,x,x)=x", {x});
    rb.expect(p3.at(x, x, x) == x, "p3(x,x,x)=x", {x});
  }
  for (Element x = 0; x < n; ++x) {
    for (Element y = 0; y < n; ++y) {
      rb.expect(p1.at(x, y, x) == x, "p1(x,y,x)=x", {x, y});
      rb.expect(p2.at(x, y, x) == x, "p2(x,y,x)=x", {x, y});
      rb.expect(p3.at(x, y, x) == x, "p3(x,y,x)=x", {x, y});
      rb.expect(p1.at(x, x, y) == x, "p1(x,x,y)=x", {x, y});
      rb.expect(p1.at(x, y, y) == p2.at(x, y, y), "p1(x,y,y)=p2(x,y,y)", {x, y});
      rb.expect(p2.at(x, x, y) == p3.at(x, x, y), "p2(x,x,y)=p3(x,x,y)", {x, y});
      rb.expect(p3.at(x, y, y) == y, "p3(x,y,y)=y", {x, y});
    }
  }
  return rb.finish();
}

JonssonReport verify_cd4(FiniteAlgebra const& alg) {
  return verify_cd4(alg.op(Op::p1), alg.op(Op::p2), alg.op(Op::p3));
}

FiniteAlgebra certify_cd4(FiniteAlgebra alg) {
  auto report = verify_cd4(alg);
  if (!report.ok) {
    throw PreconditionError("algebra fails the CD(4) identity " + report.failures.front().identity);
  }
  alg.verified_ = true;
  return alg;
}

namespace {

void require_cd4(FiniteAlgebra const& alg) {
  if (alg.verified()) return;
  auto report = verify_cd4(alg);
  if (!report.ok) {
    throw PreconditionError("algebra fails the CD(4) identity " + report.failures.front().identity);
  }
}

}  // namespace

OperationTable derived_l(FiniteAlgebra const& alg) {
  require_cd4(alg);
  auto const n = static_cast<Element>(alg.size());
  std::vector<Element> values(n * n);
  for (Element x = 0; x < n; ++x) {
    for (Element y = 0; y < n; ++y) {
      auto v = alg.apply(Op::p2, y, x, x);
      if (alg.apply(Op::p1, y, x, x) != v) {
        throw InvariantViolation("p1(y,x,x) differs from l(x,y)");
      }
      values[x * n + y] = v;
    }
  }
  return binary_table(n, std::move(values));
}

OperationTable derived_r(FiniteAlgebra const& alg) {
  require_cd4(alg);
  auto const n = static_cast<Element>(alg.size());
  std::vector<Element> values(n * n);
  for (Element x = 0; x < n; ++x) {
    for (Element y = 0; y < n; ++y) {
      auto v = alg.apply(Op::p2, x, x, y);
      if (alg.apply(Op::p3, x, x, y) != v) {
        throw InvariantViolation("p3(x,x,y) differs from r(x,y)");
      }
      values[x * n + y] = v;
    }
  }
  return binary_table(n, std::move(values));
}

JonssonReport verify_lr_idempotence(FiniteAlgebra const& alg) {
  auto const n = static_cast<Element>(alg.size());
  auto l = [&](Element x, Element y) { return alg.apply(Op::p2, y, x, x); };
  auto r = [&](Element x, Element y) { return alg.apply(Op::p2, x, x, y); };
  ReportBuilder rb;
  for (Element x = 0; x < n; ++x) {
    for (Element y = 0; y < n; ++y) {
      rb.expect(l(x, l(x, y)) == l(x, y), "l(x,l(x,y))=l(x,y)", {x, y});
      rb.expect(r(x, r(x, y)) == r(x, y), "r(x,r(x,y))=r(x,y)", {x, y});
    }
  }
  return rb.finish();
}

// ---------------------------------------------------------------------------
// Exponents and unary maps
// ---------------------------------------------------------------------------

ReducedExponent::ReducedExponent(std::size_t universe, std::uint64_t value)
    : threshold_(universe) {
  for (std::uint64_t i = 2; i <= universe; ++i) {
    auto g = std::gcd(modulus_, i);
    if (modulus_ / g > std::numeric_limits<std::uint64_t>::max() / i) {
      throw ResourceError("universe too large for exponent reduction");
    }
    modulus_ = modulus_ / g * i;
  }
  saturated_ = value;
  residue_ = value % modulus_;
}

ReducedExponent& ReducedExponent::operator*=(std::uint64_t factor) {
  if (!overflowed_) {
    if (factor != 0 && saturated_ > std::numeric_limits<std::uint64_t>::max() / factor) {
      overflowed_ = true;
    } else {
      saturated_ *= factor;
    }
  }
  if (factor == 0) {
    overflowed_ = false;
    saturated_ = 0;
  }
  residue_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(residue_) * factor) %
                                        modulus_);
  return *this;
}

ReducedExponent ReducedExponent::predecessor() const {
  if (!overflowed_ && saturated_ == 0) throw PreconditionError("predecessor of zero exponent");
  ReducedExponent out = *this;
  if (!out.overflowed_) --out.saturated_;
  out.residue_ = (out.residue_ + modulus_ - 1) % modulus_;
  return out;
}

std::optional<std::uint64_t> ReducedExponent::exact() const {
  if (overflowed_) return std::nullopt;
  return saturated_;
}

std::uint64_t ReducedExponent::effective() const {
  if (!overflowed_ && saturated_ < threshold_) return saturated_;
  // Any e >= n congruent to N modulo every cycle length gives f^e = f^N.
  auto shift = (residue_ + modulus_ - threshold_ % modulus_) % modulus_;
  return threshold_ + shift;
}

UnaryMap compose(UnaryMap const& outer, UnaryMap const& inner) {
  UnaryMap out(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) out[i] = outer[inner[i]];
  return out;
}

UnaryMap map_power(UnaryMap const& f, std::uint64_t e) {
  UnaryMap result(f.size());
  std::iota(result.begin(), result.end(), Element{0});
  UnaryMap base = f;
  while (e > 0) {
    if (e & 1U) result = compose(base, result);
    e >>= 1U;
    if (e > 0) base = compose(base, base);
  }
  return result;
}

UnaryMap map_power(UnaryMap const& f, ReducedExponent const& e) {
  return map_power(f, e.effective());
}

std::uint64_t retraction_exponent(UnaryMap const& f) {
  auto power = f;  // f^e
  for (std::uint64_t e = 1;; ++e) {
    if (compose(power, power) == power) return e;
    power = compose(f, power);
  }
}

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

namespace {

// Walks i = 1, 2, ... over q1^i and q3^i, checking the identities that hold
// for every i, and stops at i = n or when the joint state repeats.
void check_iterates(FiniteAlgebra const& alg, OperationTable const& l, OperationTable const& r,
                    ReducedExponent const& n1, ReducedExponent const& n3) {
  auto const n = static_cast<Element>(alg.size());
  auto const cube = static_cast<std::size_t>(n) * n * n;
  auto limit = [](ReducedExponent const& e) {
    auto x = e.exact();
    return x ? *x : std::numeric_limits<std::uint64_t>::max();
  };

  struct Side {
    Op op;
    OperationTable const* binary;
    std::uint64_t limit;
  };
  for (auto side : {Side{Op::p1, &l, limit(n1)}, Side{Op::p3, &r, limit(n3)}}) {
    // q[x,y,z] is q^i(x,y,z); iter[x,y] is (l_x)^i(y) or (r_x)^i(y).
    std::vector<Element> q(cube), iter(static_cast<std::size_t>(n) * n);
    for (Element x = 0; x < n; ++x) {
      for (Element y = 0; y < n; ++y) {
        iter[x * n + y] = y;
        for (Element z = 0; z < n; ++z) q[(x * n + y) * n + z] = side.op == Op::p1 ? x : z;
      }
    }
    std::set<std::pair<std::vector<Element>, std::vector<Element>>> seen;
    for (std::uint64_t i = 1; i <= side.limit; ++i) {
      for (Element x = 0; x < n; ++x) {
        for (Element y = 0; y < n; ++y) {
          for (Element z = 0; z < n; ++z) {
            auto& v = q[(x * n + y) * n + z];
            v = side.op == Op::p1 ? alg.apply(Op::p1, v, y, z) : alg.apply(Op::p3, x, y, v);
          }
          iter[x * n + y] = side.binary->at(x, iter[x * n + y]);
        }
      }
      for (Element x = 0; x < n; ++x) {
        for (Element y = 0; y < n; ++y) {
          auto at = [&](Element a, Element b, Element c) { return q[(a * n + b) * n + c]; };
          bool ok = side.op == Op::p1
                        ? at(x, x, y) == x && at(x, y, x) == x && at(y, x, x) == iter[x * n + y]
                        : at(x, y, y) == y && at(x, y, x) == x && at(x, x, y) == iter[x * n + y];
          if (!ok) {
            throw InvariantViolation(std::string("iterated ") + op_name(side.op) +
                                     " term breaks its identities at i=" + std::to_string(i));
          }
        }
      }
      if (!seen.emplace(q, iter).second) break;
    }
  }
}

}  // namespace

PreprocessResult preprocess_terms(FiniteAlgebra const& alg) {
  require_cd4(alg);
  auto const n = static_cast<Element>(alg.size());
  auto l = derived_l(alg);
  auto r = derived_r(alg);

  PreprocessResult out;
  ReducedExponent n1(n), n3(n);
  for (Element x = 0; x < n; ++x) {
    UnaryMap lx(n), rx(n);
    for (Element y = 0; y < n; ++y) {
      lx[y] = l.at(x, y);
      rx[y] = r.at(x, y);
    }
    out.l_exponents.push_back(retraction_exponent(lx));
    out.r_exponents.push_back(retraction_exponent(rx));
    n1 *= out.l_exponents.back();
    n3 *= out.r_exponents.back();
  }
  out.n1 = n1.exact();
  out.n3 = n3.exact();
  auto const n1m = n1.predecessor();
  auto const n3m = n3.predecessor();

  // q1^i(x,y,z) = f^i(x) for f = p1(-,y,z); q3^i(x,y,z) = g^i(z) for g = p3(x,y,-).
  auto const nn = static_cast<std::size_t>(n) * n;
  std::vector<UnaryMap> q1_top(nn), q1_prev(nn), q3_top(nn), q3_prev(nn);
  for (Element a = 0; a < n; ++a) {
    for (Element b = 0; b < n; ++b) {
      UnaryMap f(n), g(n);
      for (Element u = 0; u < n; ++u) {
        f[u] = alg.apply(Op::p1, u, a, b);
        g[u] = alg.apply(Op::p3, a, b, u);
      }
      q1_top[a * n + b] = map_power(f, n1);
      q1_prev[a * n + b] = map_power(f, n1m);
      q3_top[a * n + b] = map_power(g, n3);
      q3_prev[a * n + b] = map_power(g, n3m);
    }
  }
  auto p1 = OperationTable::from_function(3, n, [&](std::span<Element const> a) {
    return q1_top[a[1] * n + a[2]][a[0]];
  });
  auto p3 = OperationTable::from_function(3, n, [&](std::span<Element const> a) {
    return q3_top[a[0] * n + a[1]][a[2]];
  });
  auto p2 = OperationTable::from_function(3, n, [&](std::span<Element const> a) {
    auto left = q1_prev[a[1] * n + a[2]][a[0]];
    auto right = q3_prev[a[0] * n + a[1]][a[2]];
    return alg.apply(Op::p2, left, a[1], right);
  });

  check_iterates(alg, l, r, n1, n3);

  FiniteAlgebra result(std::move(p1), std::move(p2), std::move(p3));
  auto chain = verify_cd4(result);
  if (!chain.ok) {
    throw InvariantViolation("preprocessed terms break " + chain.failures.front().identity);
  }
  auto lr = verify_lr_idempotence(result);
  if (!lr.ok) {
    throw InvariantViolation("preprocessed terms break " + lr.failures.front().identity);
  }
  out.algebra = certify_cd4(std::move(result));
  return out;
}

TermExpr q1_term(std::size_t i) {
  auto x = TermExpr::variable(0), y = TermExpr::variable(1), z = TermExpr::variable(2);
  // Unfolded as p1(p1(...p1(x,y,z)...,y,z),y,z).
  auto t = x;
  for (std::size_t k = 0; k < i; ++k) t = TermExpr::apply(Op::p1, t, y, z);
  return t;
}

TermExpr q3_term(std::size_t i) {
  auto x = TermExpr::variable(0), y = TermExpr::variable(1), z = TermExpr::variable(2);
  auto t = z;
  for (std::size_t k = 0; k < i; ++k) t = TermExpr::apply(Op::p3, x, y, t);
  return t;
}

}  // namespace cdw
