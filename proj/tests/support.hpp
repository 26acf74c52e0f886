#pragma once

#include <set>
#include <string>
#include <vector>

#include "cdw/algebra.hpp"
#include "cdw/io.hpp"
#include "cdw/relstruct.hpp"

namespace cdw::test {

inline std::string data_path(std::string const& name) { return std::string(CDW_TEST_DATA) + "/" + name; }

inline RelStructure graph(std::size_t n, std::vector<std::pair<Element, Element>> const& edges,
                          bool symmetric = true) {
  std::vector<Tuple> t;
  for (auto [u, v] : edges) {
    t.push_back({u, v});
    if (symmetric) t.push_back({v, u});
  }
  RelStructure s(n);
  s.add("E", Relation(n, 2, t));
  return s;
}

inline RelStructure cycle(std::size_t n) {
  std::vector<std::pair<Element, Element>> e;
  for (Element i = 0; i < n; ++i) e.emplace_back(i, static_cast<Element>((i + 1) % n));
  return graph(n, e);
}

inline RelStructure k2() { return graph(2, {{0, 1}}); }

// Naive fixpoint closure, evaluated only through eval_op.
inline std::set<Tuple> naive_closure(FiniteAlgebra const& alg, std::vector<Tuple> const& seed) {
  std::set<Tuple> s(seed.begin(), seed.end());
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Tuple> cur(s.begin(), s.end());
    for (auto const& x : cur) {
      for (auto const& y : cur) {
        for (auto const& z : cur) {
          for (auto op : kOps) {
            Tuple out(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
              Element args[3] = {x[i], y[i], z[i]};
              out[i] = eval_op(alg.op(op), args);
            }
            grew = s.insert(out).second || grew;
          }
        }
      }
    }
  }
  return s;
}

}  // namespace cdw::test
