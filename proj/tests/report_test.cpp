#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "prodbg/harness.hpp"
#include "prodbg/parser.hpp"
#include "prodbg/report.hpp"
#include "test_util.hpp"

using namespace prodbg;

namespace {

const char* kHint = "duplicate([H|T], L2) :- duplicate(T, L1), L2 = ?.";

PipelineResult buggy_pipeline(Config cfg = {}) {
  return run_pipeline(testutil::fixture_path("dup_buggy.pl"),
                      testutil::fixture_path("dup.tests"), cfg);
}

}  // namespace

TEST_CASE("program_metrics summarizes clause shape") {
  SUBCASE("three-clause family tree") {
    Program p = parse_program(testutil::read_fixture("grandparent.pl"));
    ProgramMetrics m = program_metrics(p);
    CHECK(m.clause_count == 3);
    CHECK(m.predicate_count == 2);
    CHECK(m.avg_clause_length == doctest::Approx((1.0 + 1.0 + 3.0) / 3.0));
    CHECK(m.clauses_per_predicate ==
          std::map<std::string, int>{{"grandparent/2", 1}, {"parent/2", 2}});
    CHECK(m.clauses_per_predicate_mean == doctest::Approx(1.5));
  }

  SUBCASE("duplicate program") {
    Program p = parse_program(testutil::read_fixture("dup_buggy.pl"));
    ProgramMetrics m = program_metrics(p);
    CHECK(m.clause_count == 2);
    CHECK(m.predicate_count == 1);
    CHECK(m.avg_clause_length == doctest::Approx(2.0));
    CHECK(m.clauses_per_predicate ==
          std::map<std::string, int>{{"duplicate/2", 2}});
  }

  SUBCASE("empty program") {
    ProgramMetrics m = program_metrics(Program{});
    CHECK(m.clause_count == 0);
    CHECK(m.predicate_count == 0);
    CHECK(m.avg_clause_length == 0.0);
    CHECK(m.clauses_per_predicate.empty());
    CHECK(m.clauses_per_predicate_mean == 0.0);
    CHECK(m.max_nesting_depth == 0);
  }

  SUBCASE("nesting depth grows with structure") {
    ProgramMetrics flat = program_metrics(parse_program("p(a)."));
    ProgramMetrics deep = program_metrics(parse_program("p(f(g(h(a))))."));
    CHECK(deep.max_nesting_depth > flat.max_nesting_depth);
  }
}

TEST_CASE("fl_ranking dispatches on the method name") {
  Program p = parse_program(testutil::read_fixture("dup_buggy.pl"));
  auto suite = load_suite(testutil::fixture_path("dup.tests"));
  Config cfg;
  RunSuiteOptions ro;
  ro.trace = true;
  SuiteResult base = run_suite(p, suite, ro);
  std::string formula, note;

  SUBCASE("sbfl") {
    auto ranking = fl_ranking(p, suite, base, cfg, "sbfl", formula, note);
    CHECK(formula == "ochiai");
    CHECK(note.empty());
    REQUIRE(ranking.size() == 2);
    CHECK(ranking[0].clause_id == 1);
  }

  SUBCASE("mbfl") {
    auto ranking = fl_ranking(p, suite, base, cfg, "mbfl", formula, note);
    CHECK(formula == "metallaxis");
    REQUIRE(ranking.size() == 2);
    CHECK(ranking[0].clause_id == 1);
  }

  SUBCASE("llm endpoint down falls back to reverse source order") {
    cfg.llm.base_url = "http://127.0.0.1:1/v1";
    cfg.llm.timeout_ms = 200;
    auto ranking = fl_ranking(p, suite, base, cfg, "llm", formula, note);
    CHECK(formula.empty());
    CHECK(note.find("fallback") != std::string::npos);
    REQUIRE(ranking.size() == 2);
    CHECK(ranking[0].clause_id == 1);
    CHECK(ranking[1].clause_id == 0);
    CHECK(ranking[0].rank == 1);
  }

  SUBCASE("unknown method throws") {
    CHECK_THROWS_AS(fl_ranking(p, suite, base, cfg, "psychic", formula, note),
                    std::invalid_argument);
  }
}

TEST_CASE("run_pipeline short-circuits on a correct submission") {
  Config cfg;
  PipelineResult pr = run_pipeline(testutil::fixture_path("dup_fixed.pl"),
                                   testutil::fixture_path("dup.tests"), cfg);
  CHECK(pr.exit_code == 0);
  CHECK(pr.error.empty());
  CHECK(pr.report.all_pass);
  CHECK(pr.report.tests.passed == 4);
  CHECK(!pr.report.fl_ran);
  CHECK(!pr.report.repair_ran);
  CHECK(pr.report.metrics.clause_count == 2);
}

TEST_CASE("run_pipeline localizes and repairs a buggy submission") {
  PipelineResult pr = buggy_pipeline();
  CHECK(pr.exit_code == 1);
  const Report& r = pr.report;
  CHECK(!r.all_pass);
  CHECK(r.tests.passed == 2);
  CHECK(r.fl_ran);
  CHECK(r.fl_method == "sbfl");
  CHECK(r.fl_formula == "ochiai");
  REQUIRE(!r.ranking.empty());
  CHECK(r.ranking[0].clause_id == 1);
  CHECK(r.repair_ran);
  CHECK(r.repair.status == RepairStatus::Repaired);
  REQUIRE(r.repair.hint.has_value());
  CHECK(*r.repair.hint == kHint);
  CHECK(r.test_ms >= 0);
  CHECK(r.total_ms >= r.test_ms);
}

TEST_CASE("run_pipeline reports tool errors as exit code 2") {
  Config cfg;
  SUBCASE("missing program") {
    PipelineResult pr = run_pipeline("/nonexistent/prog.pl",
                                     testutil::fixture_path("dup.tests"), cfg);
    CHECK(pr.exit_code == 2);
    CHECK(!pr.error.empty());
  }
  SUBCASE("missing suite") {
    PipelineResult pr = run_pipeline(testutil::fixture_path("dup_buggy.pl"),
                                     "/nonexistent/suite.tests", cfg);
    CHECK(pr.exit_code == 2);
    CHECK(!pr.error.empty());
  }
  SUBCASE("unparsable program") {
    PipelineResult pr = run_pipeline(testutil::fixture_path("dup.tests"),
                                     testutil::fixture_path("dup.tests"), cfg);
    CHECK(pr.exit_code == 2);
    CHECK(!pr.error.empty());
  }
}

TEST_CASE("run_pipeline stops at the wall budget") {
  Config cfg;
  cfg.wall_budget_ms = 0;
  PipelineResult pr = buggy_pipeline(cfg);
  CHECK(pr.exit_code == 1);
  CHECK(!pr.report.fl_ran);
  CHECK(!pr.report.repair_ran);
  std::string text = render_report(pr.report, {"fl"}, "text", true);
  CHECK(text.find("time budget exhausted") != std::string::npos);
}

TEST_CASE("render_report validates sections and format") {
  Report r;
  CHECK_THROWS_AS(render_report(r, {"tests", "bogus"}, "text", false),
                  std::invalid_argument);
  CHECK_THROWS_AS(render_report(r, {"tests"}, "yaml", false),
                  std::invalid_argument);
  CHECK_NOTHROW(render_report(
      r, {"tests", "fl", "repair_hint", "repair_full_diff", "metrics"}, "text",
      false));
}

TEST_CASE("hint output never reveals the repaired clause") {
  PipelineResult pr = buggy_pipeline();
  REQUIRE(pr.report.repair.status == RepairStatus::Repaired);

  std::string hint_text =
      render_report(pr.report, {"tests", "fl", "repair_hint"}, "text", true);
  CHECK(hint_text.find("L2 = ?") != std::string::npos);
  CHECK(hint_text.find("[H, H|L1]") == std::string::npos);

  std::string hint_json =
      render_report(pr.report, {"tests", "fl", "repair_hint"}, "json", true);
  CHECK(hint_json.find("[H, H|L1]") == std::string::npos);

  std::string diff_text =
      render_report(pr.report, {"repair_full_diff"}, "text", true);
  CHECK(diff_text.find("diff:") != std::string::npos);
  CHECK(diff_text.find("[H, H|L1]") != std::string::npos);
}

TEST_CASE("json report carries the fixed top-level keys") {
  PipelineResult pr = buggy_pipeline();
  std::string out = render_report(
      pr.report, {"tests", "fl", "repair_hint", "metrics"}, "json", true);
  nlohmann::json j = nlohmann::json::parse(out);
  REQUIRE(j.contains("tests"));
  REQUIRE(j.contains("localization"));
  REQUIRE(j.contains("repair"));
  REQUIRE(j.contains("metrics"));
  REQUIRE(j.contains("timing"));

  CHECK(j["tests"]["total"] == 4);
  CHECK(j["tests"]["passed"] == 2);
  CHECK(j["tests"]["results"].size() == 4);
  CHECK(j["tests"]["results"][0]["millis"] == 0);
  CHECK(j["localization"]["method"] == "sbfl");
  CHECK(j["localization"]["formula"] == "ochiai");
  CHECK(j["localization"]["ranking"].size() == 2);
  CHECK(j["localization"]["ranking"][0]["clause"] == 1);
  CHECK(j["localization"]["ranking"][0]["rank"] == 1);
  CHECK(j["repair"]["status"] == "repaired");
  CHECK(j["repair"]["clause"] == 1);
  CHECK(j["repair"]["hint"] == kHint);
  CHECK(j["repair"]["diff"].is_null());
  CHECK(j["repair"]["millis"] == 0);
  CHECK(j["metrics"]["clause_count"] == 2);
  CHECK(j["timing"]["test_ms"] == 0);
  CHECK(j["timing"]["total_ms"] == 0);

  std::string minimal = render_report(pr.report, {}, "json", true);
  nlohmann::json mj = nlohmann::json::parse(minimal);
  CHECK(mj["tests"].is_null());
  CHECK(mj["localization"].is_null());
  CHECK(mj["repair"].is_null());
  CHECK(mj["metrics"].is_null());
  CHECK(!mj["timing"].is_null());
}

TEST_CASE("zero_timing makes renders byte-stable") {
  PipelineResult a = buggy_pipeline();
  PipelineResult b = buggy_pipeline();
  std::vector<std::string> sections = {"tests", "fl", "repair_hint", "metrics"};
  CHECK(render_report(a.report, sections, "json", true) ==
        render_report(b.report, sections, "json", true));
  CHECK(render_report(a.report, sections, "text", true) ==
        render_report(b.report, sections, "text", true));

  std::string zero = render_report(a.report, {}, "text", true);
  CHECK(zero.find("test: 0 ms, localization: 0 ms, repair: 0 ms, total: 0 ms") !=
        std::string::npos);
}
