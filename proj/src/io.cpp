#include "cdw/io.hpp"

#include <fstream>

#include "cdw/error.hpp"

namespace cdw {

namespace {

Json const& field(Json const& j, char const* name, char const* where) {
  if (!j.is_object()) throw InputError(std::string(where) + " must be a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw InputError(std::string(where) + " is missing \"" + name + "\"");
  return *it;
}

std::size_t natural(Json const& j, std::string const& what) {
  if (!j.is_number_unsigned()) throw InputError(what + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

std::vector<Element> element_list(Json const& j, std::string const& what, std::size_t bound) {
  if (!j.is_array()) throw InputError(what + " must be an array");
  std::vector<Element> out;
  out.reserve(j.size());
  for (auto const& v : j) {
    auto x = natural(v, what + " entry");
    if (x >= bound) throw InputError(what + " entry out of range");
    out.push_back(static_cast<Element>(x));
  }
  return out;
}

}  // namespace

Json read_json_file(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (Json::parse_error const& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(std::filesystem::path const& path, Json const& value) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << value.dump(2) << "\n";
}

FiniteAlgebra algebra_from_json(Json const& j) {
  auto const n = natural(field(j, "size", "algebra"), "algebra size");
  if (n == 0) throw InputError("algebra size must be positive");
  if (n > 255) throw InputError("algebra size is limited to 255");
  auto const& ops = field(j, "ops", "algebra");
  std::array<OperationTable, 3> tables;
  for (auto op : kOps) {
    auto const name = op_name(op);
    auto entries = element_list(field(ops, name, "algebra ops"), std::string("table ") + name, n);
    tables[static_cast<std::size_t>(op)] = OperationTable(3, n, std::move(entries));
  }
  return FiniteAlgebra(tables[0], tables[1], tables[2]);
}

RelStructure structure_from_json(Json const& j) {
  auto const n = natural(field(j, "universe", "structure"), "universe");
  auto const& rels = field(j, "relations", "structure");
  if (!rels.is_object()) throw InputError("relations must be an object");
  RelStructure s(n);
  for (auto const& [name, body] : rels.items()) {
    auto const where = "relation " + name;
    auto const arity = natural(field(body, "arity", where.c_str()), where + " arity");
    auto const& raw = field(body, "tuples", where.c_str());
    if (!raw.is_array()) throw InputError(where + " tuples must be an array");
    std::vector<Tuple> tuples;
    for (auto const& t : raw) {
      auto tuple = element_list(t, where + " tuple", n);
      if (tuple.size() != arity) throw InputError(where + " has a tuple of the wrong arity");
      tuples.push_back(std::move(tuple));
    }
    s.add(name, Relation(n, arity, std::move(tuples)));
  }
  return s;
}

Json to_json(FiniteAlgebra const& alg) {
  Json ops = Json::object();
  for (auto op : kOps) ops[op_name(op)] = alg.op(op).table();
  return Json{{"size", alg.size()}, {"ops", std::move(ops)}};
}

Json to_json(RelStructure const& s) {
  Json rels = Json::object();
  for (auto const& [name, rel] : s.relations()) {
    rels[name] = Json{{"arity", rel.arity()}, {"tuples", rel.tuples()}};
  }
  return Json{{"universe", s.universe()}, {"relations", std::move(rels)}};
}

Json to_json(JonssonReport const& report) {
  Json failures = Json::array();
  for (auto const& f : report.failures) {
    failures.push_back(Json{{"identity", f.identity}, {"witness", f.witness}});
  }
  return Json{{"ok", report.ok}, {"failures", std::move(failures)}};
}

Json to_json(SolveTrace const& trace) {
  Json steps = Json::array();
  for (auto const& s : trace.steps) {
    Json step{{"kind", s.kind}};
    if (s.coordinate) step["coordinate"] = *s.coordinate;
    if (s.side) step["side"] = side_name(*s.side);
    if (s.kind == "ideal_reduce") step["ideal_size"] = s.ideal_size;
    if (s.kind == "simple_reduce") {
      step["platoon"] = s.platoon;
      step["class_sizes"] = s.class_sizes;
    }
    step["potential"] = s.potential;
    steps.push_back(std::move(step));
  }
  return Json{{"k", trace.k}, {"steps", std::move(steps)}};
}

Json to_json(LemmaSuiteResult const& result) {
  Json reports = Json::array();
  for (auto const& r : result.reports) {
    Json dumps = Json::array();
    for (auto const& c : r.counterexamples) {
      if (!c.empty()) dumps.push_back(c);
    }
    reports.push_back(Json{{"id", r.id},
                           {"statement", r.anchor},
                           {"checked", r.checked},
                           {"vacuous", r.vacuous},
                           {"counterexamples", r.counterexamples.size()},
                           {"witnesses", std::move(dumps)}});
  }
  return Json{{"ok", result.ok()},
              {"bases_total", result.bases_total},
              {"bases_checked", result.bases_checked},
              {"pairs", result.pairs},
              {"relations", result.relations},
              {"simple_ideal_free", result.simple_ideal_free},
              {"enumeration_partial", result.enumeration_partial},
              {"budget_exhausted", result.budget_exhausted},
              {"reports", std::move(reports)}};
}

Json strategy_summary(Strategy const& h) {
  Json sets = Json::array();
  for (std::size_t key = 0; key < h.key_count(); ++key) {
    sets.push_back(Json{{"index_set", h.index_set(key)}, {"size", h.at(key).size()}});
  }
  return Json{{"k", h.k()}, {"potential", h.potential()}, {"sets", std::move(sets)}};
}

Json assignment_to_json(std::vector<Element> const& h) {
  Json out = Json::object();
  for (std::size_t i = 0; i < h.size(); ++i) out[std::to_string(i)] = h[i];
  return out;
}

}  // namespace cdw
