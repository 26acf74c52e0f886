// Command-line front end. Results go to stdout as JSON, diagnostics to stderr.
// Exit codes: 0 success or SAT, 1 UNSAT or a failed check, 2 bad input,
// 3 internal invariant violation.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cdw/error.hpp"
#include "cdw/io.hpp"
#include "cdw/jonsson.hpp"
#include "cdw/oracle.hpp"
#include "cdw/reductions.hpp"
#include "cdw/strategy.hpp"

namespace {

using cdw::Json;

enum Exit : int { kOk = 0, kNo = 1, kInput = 2, kInvariant = 3 };

void emit(Json const& j) { std::cout << j.dump(2) << "\n"; }

int fail(char const* kind, std::string const& message, int code) {
  emit(Json{{"error", Json{{"kind", kind}, {"message", message}}}});
  std::cerr << "error: " << message << "\n";
  return code;
}

struct RunConfig {
  std::string algebra;
  std::string instance;
  std::string templ;
  std::string output;
  std::string trace;
  std::optional<std::size_t> k;
  bool unchecked = false;
  bool planted = false;
  std::uint64_t seed = 1;
  std::size_t max_size = 3;
  std::size_t max_a = 6;
  std::size_t max_b = 4;
  std::size_t jobs = 1;
  cdw::Budgets budgets = cdw::Budgets::from_env();
};

int check_jonsson(RunConfig const& cfg) {
  auto alg = cdw::algebra_from_json(cdw::read_json_file(cfg.algebra));
  auto report = cdw::verify_cd4(alg);
  emit(cdw::to_json(report));
  return report.ok ? kOk : kNo;
}

int preprocess(RunConfig const& cfg) {
  auto alg = cdw::algebra_from_json(cdw::read_json_file(cfg.algebra));
  auto result = cdw::preprocess_terms(alg);
  Json out{{"l_exponents", result.l_exponents}, {"r_exponents", result.r_exponents}};
  out["n1"] = result.n1 ? Json(*result.n1) : Json(nullptr);
  out["n3"] = result.n3 ? Json(*result.n3) : Json(nullptr);
  if (cfg.output.empty()) {
    out["algebra"] = cdw::to_json(result.algebra);
  } else {
    cdw::write_json_file(cfg.output, cdw::to_json(result.algebra));
    out["output"] = cfg.output;
  }
  emit(out);
  return kOk;
}

int consistency(RunConfig const& cfg) {
  auto a = cdw::structure_from_json(cdw::read_json_file(cfg.instance));
  auto b = cdw::structure_from_json(cdw::read_json_file(cfg.templ));
  auto k = cfg.k.value_or(cdw::choose_k(a));
  if (k == 0) throw cdw::InputError("k must be positive");
  auto h = cdw::enforce(cdw::init_full(a, b, k));
  if (!h) {
    emit(Json{{"status", "unsat"}, {"k", k}});
    return kNo;
  }
  emit(Json{{"status", "sat-unknown"}, {"strategy", cdw::strategy_summary(*h)}});
  return kOk;
}

Json solution_json(std::optional<std::vector<cdw::Element>> const& h) {
  if (!h) return Json{{"status", "unsat"}};
  return Json{{"status", "sat"}, {"homomorphism", cdw::assignment_to_json(*h)}};
}

int solve(RunConfig const& cfg) {
  auto alg = cdw::algebra_from_json(cdw::read_json_file(cfg.algebra));
  auto a = cdw::structure_from_json(cdw::read_json_file(cfg.instance));
  auto b = cdw::structure_from_json(cdw::read_json_file(cfg.templ));
  cdw::SolveOptions options;
  options.unchecked = cfg.unchecked;
  try {
    auto result = cdw::solve(a, b, alg, options);
    if (!cfg.trace.empty()) cdw::write_json_file(cfg.trace, cdw::to_json(result.trace));
    emit(solution_json(result.homomorphism));
    return result.homomorphism ? kOk : kNo;
  } catch (cdw::SolveFailure const& e) {
    if (!cfg.trace.empty()) cdw::write_json_file(cfg.trace, cdw::to_json(e.trace()));
    throw;
  }
}

int oracle_solve(RunConfig const& cfg) {
  auto a = cdw::structure_from_json(cdw::read_json_file(cfg.instance));
  auto b = cdw::structure_from_json(cdw::read_json_file(cfg.templ));
  if (!cfg.algebra.empty()) {
    auto alg = cdw::algebra_from_json(cdw::read_json_file(cfg.algebra));
    if (alg.size() != b.universe()) throw cdw::InputError("algebra and template sizes differ");
  }
  auto h = cdw::brute_force_hom(a, b, cfg.budgets.brute_force_limit);
  emit(solution_json(h));
  return h ? kOk : kNo;
}

int lemmas(RunConfig const& cfg) {
  cdw::LemmaSuiteOptions options;
  options.max_size = cfg.max_size;
  options.budget_seconds = cfg.budgets.lemma_seconds;
  options.samples = cfg.budgets.samples;
  options.jobs = cfg.jobs;
  options.seed = cfg.seed;
  auto result = cdw::lemma_suite(options);
  emit(cdw::to_json(result));
  return result.ok() ? kOk : kNo;
}

int gen(RunConfig const& cfg) {
  cdw::InstanceParams params;
  params.planted = cfg.planted;
  params.max_a = cfg.max_a;
  params.max_b = cfg.max_b;
  auto inst = cdw::random_instance(cfg.seed, params);
  std::filesystem::path dir(cfg.output);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw cdw::InputError("cannot create " + dir.string());
  Json files{{"instance", (dir / "instance.json").string()},
             {"template", (dir / "template.json").string()},
             {"algebra", (dir / "algebra.json").string()}};
  cdw::write_json_file(dir / "instance.json", cdw::to_json(inst.a));
  cdw::write_json_file(dir / "template.json", cdw::to_json(inst.b));
  cdw::write_json_file(dir / "algebra.json", cdw::to_json(inst.alg));
  if (inst.planted) {
    files["planted"] = (dir / "planted.json").string();
    cdw::write_json_file(dir / "planted.json", cdw::assignment_to_json(*inst.planted));
  }
  emit(files);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded-width solver for templates with CD(4) polymorphisms"};
  app.set_version_flag("--version", std::string(cdw::kSchemaVersion));
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--jobs", cfg.jobs, "Worker threads for the lemma suite")
      ->check(CLI::PositiveNumber);
  int (*action)(RunConfig const&) = nullptr;

  auto* cj = app.add_subcommand("check-jonsson", "Check the CD(4) identities");
  cj->add_option("algebra", cfg.algebra)->required();
  cj->callback([&] { action = check_jonsson; });

  auto* pp = app.add_subcommand("preprocess", "Replace p1, p2, p3 by lr-idempotent terms");
  pp->add_option("algebra", cfg.algebra)->required();
  pp->add_option("-o,--output", cfg.output);
  pp->callback([&] { action = preprocess; });

  auto* cons = app.add_subcommand("consistency", "Greatest (k-1,k)-strategy");
  cons->add_option("--instance", cfg.instance)->required();
  cons->add_option("--template", cfg.templ)->required();
  cons->add_option("--k", cfg.k)->check(CLI::PositiveNumber);
  cons->callback([&] { action = consistency; });

  auto add_solve_flags = [&](CLI::App* cmd, bool algebra_required) {
    auto* alg = cmd->add_option("--algebra", cfg.algebra);
    if (algebra_required) alg->required();
    cmd->add_option("--template", cfg.templ)->required();
    cmd->add_option("--instance", cfg.instance)->required();
    cmd->add_flag("--unchecked", cfg.unchecked);
    cmd->add_option("--trace", cfg.trace);
  };
  auto* sv = app.add_subcommand("solve", "Find a homomorphism or prove there is none");
  add_solve_flags(sv, true);
  sv->callback([&] { action = solve; });

  auto* lm = app.add_subcommand("lemmas", "Check the structural lemmas on small algebras");
  lm->add_option("--max-size", cfg.max_size)->check(CLI::Range(1, 4));
  lm->add_option("--budget-sec", cfg.budgets.lemma_seconds)->check(CLI::NonNegativeNumber);
  lm->add_option("--seed", cfg.seed);
  lm->callback([&] { action = lemmas; });

  auto* gn = app.add_subcommand("gen", "Write a random instance, template and algebra");
  gn->add_option("--seed", cfg.seed)->required();
  gn->add_option("--out", cfg.output)->required();
  gn->add_flag("--planted", cfg.planted);
  gn->add_option("--max-a", cfg.max_a)->check(CLI::PositiveNumber);
  gn->add_option("--max-b", cfg.max_b)->check(CLI::PositiveNumber);
  gn->callback([&] { action = gen; });

  auto* orc = app.add_subcommand("oracle", "Brute-force ground truth");
  orc->require_subcommand(1);
  auto* os = orc->add_subcommand("solve", "Lexicographically least homomorphism by search");
  add_solve_flags(os, false);
  os->callback([&] { action = oracle_solve; });

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), kInput);
  }

  try {
    return action(cfg);
  } catch (cdw::InputError const& e) {
    return fail("input", e.what(), kInput);
  } catch (cdw::PreconditionError const& e) {
    return fail("precondition", e.what(), kInput);
  } catch (cdw::ResourceError const& e) {
    return fail("resource", e.what(), kInput);
  } catch (cdw::InvariantViolation const& e) {
    return fail("invariant", e.what(), kInvariant);
  } catch (nlohmann::json::exception const& e) {
    return fail("input", e.what(), kInput);
  }
}
