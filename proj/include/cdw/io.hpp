#pragma once

// JSON encodings of algebras, structures, strategies, traces and reports.
//
// Algebra:   {"size": n, "ops": {"p1": [...], "p2": [...], "p3": [...]}}
//            with each table flat row-major over n^3 argument triples.
// Structure: {"universe": n, "relations": {"E": {"arity": 2, "tuples": [[0,1]]}}}

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdw/algebra.hpp"
#include "cdw/jonsson.hpp"
#include "cdw/oracle.hpp"
#include "cdw/reductions.hpp"
#include "cdw/relstruct.hpp"
#include "cdw/strategy.hpp"

namespace cdw {

using Json = nlohmann::ordered_json;

inline constexpr char const* kSchemaVersion = "1.0";

// Throws InputError if the file is missing or not valid JSON.
Json read_json_file(std::filesystem::path const& path);
void write_json_file(std::filesystem::path const& path, Json const& value);

// Both throw InputError on schema violations.
FiniteAlgebra algebra_from_json(Json const& j);
RelStructure structure_from_json(Json const& j);

Json to_json(FiniteAlgebra const& alg);
Json to_json(RelStructure const& s);
Json to_json(JonssonReport const& report);
Json to_json(SolveTrace const& trace);
Json to_json(LemmaSuiteResult const& result);
// Per-index-set sizes.
Json strategy_summary(Strategy const& h);
// {"0": h(0), "1": h(1), ...}
Json assignment_to_json(std::vector<Element> const& h);

}  // namespace cdw
