#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "prodbg/harness.hpp"
#include "prodbg/parser.hpp"
#include "prodbg/pretty.hpp"
#include "prodbg/repair.hpp"
#include "prodbg/sbfl.hpp"
#include "test_util.hpp"

using namespace prodbg;

namespace {

const char* kHint = "duplicate([H|T], L2) :- duplicate(T, L1), L2 = ?.";

std::vector<RankedClause> sbfl_ranking(const Program& p,
                                       const std::vector<TestCase>& suite) {
  RunSuiteOptions opts;
  opts.trace = true;
  SuiteResult base = run_suite(p, suite, opts);
  Spectrum sp = collect_spectrum(base, p);
  return rank(score(sp, Formula::Ochiai), p);
}

}  // namespace

TEST_CASE("section-one repair end to end") {
  Program p = parse_program(testutil::read_fixture("dup_buggy.pl"));
  std::vector<TestCase> suite =
      parse_suite(testutil::read_fixture("dup.tests"));
  std::vector<RankedClause> ranking = sbfl_ranking(p, suite);
  REQUIRE(ranking[0].clause_id == 1);

  RepairResult r = repair(p, suite, ranking);
  REQUIRE(r.status == RepairStatus::Repaired);
  REQUIRE(r.patch.has_value());
  CHECK(r.patch->clause_id == 1);
  CHECK(r.patch->repaired_text ==
        "duplicate([H|T], L2) :- duplicate(T, L1), L2 = [H, H|L1].");
  REQUIRE(r.hint.has_value());
  CHECK(*r.hint == kHint);
  CHECK(r.flipped_to_pass == std::set<int>{1, 2});
  CHECK(r.flipped_to_fail.empty());
  CHECK(r.candidates_tested > 0);
  CHECK(!r.diff.empty());

  // Accepted patches re-verify from scratch.
  REQUIRE(r.repaired.has_value());
  Program again = parse_program(pretty_program(*r.repaired));
  SuiteResult rerun = run_suite(again, suite);
  CHECK(rerun.passed == static_cast<int>(suite.size()));

  // Clauses outside the patch survive byte-identical.
  CHECK(pretty_clause(again.clauses[0]) == pretty_clause(p.clauses[0]));
}

TEST_CASE("repair_targets mirrors perfect localization") {
  Program p = parse_program(testutil::read_fixture("dup_buggy.pl"));
  std::vector<TestCase> suite =
      parse_suite(testutil::read_fixture("dup.tests"));
  RepairResult r = repair_targets(p, suite, {1});
  REQUIRE(r.status == RepairStatus::Repaired);
  CHECK(r.patch->clause_id == 1);
  CHECK(*r.hint == kHint);

  // Pointing the search at the wrong clause finds nothing at k=1 within a
  // small budget.
  RepairConfig cfg;
  cfg.max_k = 1;
  cfg.mutant_budget = 50;
  cfg.limits.max_steps = 20000;
  cfg.limits.wall_clock_ms = 500;
  RepairResult miss = repair_targets(p, suite, {0}, cfg);
  CHECK(miss.status == RepairStatus::NotFound);
  CHECK(!miss.patch.has_value());
  CHECK(miss.candidates_tested > 0);
}

TEST_CASE("no failing tests means nothing to repair") {
  Program p = parse_program(testutil::read_fixture("dup_fixed.pl"));
  std::vector<TestCase> suite =
      parse_suite(testutil::read_fixture("dup.tests"));
  std::vector<RankedClause> ranking = sbfl_ranking(p, suite);
  RepairResult r = repair(p, suite, ranking);
  CHECK(r.status == RepairStatus::NotFound);
  CHECK(r.flipped_to_pass.empty());
  CHECK(r.flipped_to_fail.empty());
  CHECK(r.candidates_tested == 0);
}

TEST_CASE("time budget of one millisecond forces timeout") {
  Program p = parse_program(testutil::read_fixture("dup_buggy.pl"));
  std::vector<TestCase> suite =
      parse_suite(testutil::read_fixture("dup.tests"));
  RepairConfig cfg;
  cfg.time_budget_ms = 1;
  RepairResult r = repair_targets(p, suite, {1}, cfg);
  CHECK(r.status == RepairStatus::Timeout);
}

TEST_CASE("select_best prefers flips, then closeness, then order") {
  Program original = parse_program(testutil::read_fixture("dup_buggy.pl"));

  RepairCandidate two_flips;
  two_flips.program = parse_program(testutil::read_fixture("dup_fixed.pl"));
  two_flips.flips.to_pass = {1, 2};
  two_flips.order = 5;

  RepairCandidate one_flip;
  one_flip.program = parse_program(
      "duplicate([], []).\n"
      "duplicate([H|T], L2) :- duplicate(T, L1), L2 = [H, H].\n");
  one_flip.flips.to_pass = {1};
  one_flip.order = 1;

  std::vector<RepairCandidate> cands = {one_flip, two_flips};
  CHECK(select_best(cands, original).order == 5);

  // Equal flips: fewer differing subtree paths wins. The first candidate
  // edits two separate spots, the second only one.
  RepairCandidate far;
  far.program = parse_program(
      "duplicate([], []).\n"
      "duplicate([H|T], L2) :- duplicate(T, V0), L2 = (H, V1, L1).\n");
  far.flips.to_pass = {1};
  far.order = 1;
  RepairCandidate near;
  near.program = parse_program(
      "duplicate([], []).\n"
      "duplicate([H|T], L2) :- duplicate(T, L1), L2 = (H, T, L1).\n");
  near.flips.to_pass = {1};
  near.order = 2;
  std::vector<RepairCandidate> close = {far, near};
  CHECK(select_best(close, original).order == 2);

  // Full tie: enumeration order decides.
  RepairCandidate a = near;
  a.order = 7;
  RepairCandidate b = near;
  b.order = 3;
  std::vector<RepairCandidate> tie = {a, b};
  CHECK(select_best(tie, original).order == 3);
}

TEST_CASE("make_hint abstracts per changed clause") {
  Program buggy = parse_program(testutil::read_fixture("dup_buggy.pl"));
  Program fixed = parse_program(testutil::read_fixture("dup_fixed.pl"));
  CHECK(make_hint(buggy, fixed) == kHint);
  CHECK_THROWS_AS(make_hint(buggy, buggy), std::invalid_argument);

  Program two_a = parse_program("p(1).\nq(2).\n");
  Program two_b = parse_program("p(9).\nq(8).\n");
  std::string hint = make_hint(two_a, two_b);
  CHECK(hint.find("p(?).") != std::string::npos);
  CHECK(hint.find("q(?).") != std::string::npos);
  CHECK(hint.find("p(?).") < hint.find("q(?)."));
}

TEST_CASE("repair_json carries the documented keys") {
  Program p = parse_program(testutil::read_fixture("dup_buggy.pl"));
  std::vector<TestCase> suite =
      parse_suite(testutil::read_fixture("dup.tests"));
  RepairResult r = repair_targets(p, suite, {1});
  std::string json = repair_json(r);
  CHECK(json.find("\"status\"") != std::string::npos);
  CHECK(json.find("repaired") != std::string::npos);
  CHECK(json.find("\"clause\"") != std::string::npos);
  CHECK(json.find("\"diff\"") != std::string::npos);
  CHECK(json.find("\"hint\"") != std::string::npos);
  CHECK(json.find("\"flipped_to_pass\"") != std::string::npos);
  CHECK(json.find("\"candidates_tested\"") != std::string::npos);
  CHECK(json.find("\"millis\"") != std::string::npos);
}

TEST_CASE("hint never appears without a repair") {
  Program p = parse_program(
      "p(0).\n"
      "p(X) :- X > 100, p(X).\n");
  std::vector<TestCase> suite = parse_suite("+ p(5).\n");
  RepairConfig cfg;
  cfg.max_k = 1;
  cfg.mutant_budget = 10;
  cfg.top_n_clauses = 1;
  std::vector<RankedClause> ranking = sbfl_ranking(p, suite);
  RepairResult r = repair(p, suite, ranking, cfg);
  if (r.status != RepairStatus::Repaired) {
    CHECK(!r.hint.has_value());
    CHECK(!r.patch.has_value());
  }
}
