#include <string>
#include <vector>

#include "doctest.h"
#include "prodbg/harness.hpp"
#include "prodbg/parser.hpp"
#include "test_util.hpp"

using namespace prodbg;

TEST_CASE("parse_suite reads markers, comments and blanks") {
  std::vector<TestCase> suite = parse_suite(
      "% suite\n"
      "+ duplicate([1,2],[1,1,2,2]).\n"
      "\n"
      "- duplicate([1],[1]).\n");
  REQUIRE(suite.size() == 2);
  CHECK(suite[0].id == 0);
  CHECK(suite[0].expectation == Expectation::Succeed);
  CHECK(suite[0].raw_text == "duplicate([1,2],[1,1,2,2])");
  CHECK(suite[1].id == 1);
  CHECK(suite[1].expectation == Expectation::Fail);

  CHECK(parse_suite("% only comments\n\n").empty());
  CHECK(parse_suite("+ a(1).\n+ a(1).\n").size() == 2);
  CHECK_THROWS(parse_suite("* a(1).\n"));
  CHECK_THROWS(parse_suite("+ a(((.\n"));
}

TEST_CASE("classify_outcome is the stated pure function") {
  CHECK(classify_outcome(SolveStatus::Success, Expectation::Succeed) ==
        TestOutcome::Pass);
  CHECK(classify_outcome(SolveStatus::Failure, Expectation::Fail) ==
        TestOutcome::Pass);
  CHECK(classify_outcome(SolveStatus::Failure, Expectation::Succeed) ==
        TestOutcome::Fail);
  CHECK(classify_outcome(SolveStatus::Success, Expectation::Fail) ==
        TestOutcome::Fail);
  CHECK(classify_outcome(SolveStatus::RuntimeError, Expectation::Succeed) ==
        TestOutcome::Error);
  CHECK(classify_outcome(SolveStatus::RuntimeError, Expectation::Fail) ==
        TestOutcome::Error);
  CHECK(classify_outcome(SolveStatus::ResourceLimit, Expectation::Succeed) ==
        TestOutcome::Timeout);
}

TEST_CASE("run_suite on the correct and buggy duplicate programs") {
  std::vector<TestCase> suite = parse_suite(
      "+ duplicate([],[]).\n"
      "+ duplicate([1,2],[1,1,2,2]).\n");

  Program fixed = parse_program(testutil::read_fixture("dup_fixed.pl"));
  SuiteResult ok = run_suite(fixed, suite);
  CHECK(ok.passed == 2);
  CHECK(ok.failed == 0);
  REQUIRE(ok.results.size() == 2);
  CHECK(ok.results[0].outcome == TestOutcome::Pass);
  CHECK(ok.results[1].outcome == TestOutcome::Pass);

  Program buggy = parse_program(testutil::read_fixture("dup_buggy.pl"));
  SuiteResult bad = run_suite(buggy, suite);
  CHECK(bad.passed == 1);
  CHECK(bad.failed == 1);
  CHECK(bad.results[0].outcome == TestOutcome::Pass);
  CHECK(bad.results[1].outcome == TestOutcome::Fail);
}

TEST_CASE("run_suite reports timeouts and errors") {
  std::vector<TestCase> suite = parse_suite("+ p.\n");
  RunSuiteOptions opts;
  opts.limits.max_steps = 2000;
  SuiteResult r = run_suite(parse_program("p :- p.\n"), suite, opts);
  REQUIRE(r.results.size() == 1);
  CHECK(r.results[0].outcome == TestOutcome::Timeout);
  CHECK(r.timeouts == 1);

  SuiteResult e = run_suite(parse_program("p :- X is Y + 1, X > 0.\n"), suite,
                            RunSuiteOptions{});
  CHECK(e.results[0].outcome == TestOutcome::Error);
  CHECK(e.errors == 1);

  SuiteResult empty = run_suite(parse_program("a.\n"), {}, RunSuiteOptions{});
  CHECK(empty.results.empty());
  CHECK(empty.passed == 0);
}

TEST_CASE("run_suite captures traces when asked") {
  std::vector<TestCase> suite = parse_suite("+ duplicate([],[]).\n");
  Program p = parse_program(testutil::read_fixture("dup_buggy.pl"));
  RunSuiteOptions opts;
  opts.trace = true;
  SuiteResult r = run_suite(p, suite, opts);
  REQUIRE(r.results.size() == 1);
  CHECK(!r.results[0].trace.empty());
  SuiteResult r2 = run_suite(p, suite, RunSuiteOptions{});
  CHECK(r2.results[0].trace.empty());
}

TEST_CASE("compare_results computes pass-status flips") {
  std::vector<TestCase> suite = parse_suite(
      "+ duplicate([],[]).\n"
      "+ duplicate([1,2],[1,1,2,2]).\n");
  Program buggy = parse_program(testutil::read_fixture("dup_buggy.pl"));
  Program fixed = parse_program(testutil::read_fixture("dup_fixed.pl"));
  SuiteResult base = run_suite(buggy, suite);
  SuiteResult cand = run_suite(fixed, suite);

  FlipSet self = compare_results(base, base);
  CHECK(self.to_pass.empty());
  CHECK(self.to_fail.empty());

  FlipSet up = compare_results(base, cand);
  CHECK(up.to_pass == std::set<int>{1});
  CHECK(up.to_fail.empty());

  FlipSet down = compare_results(cand, base);
  CHECK(down.to_pass.empty());
  CHECK(down.to_fail == std::set<int>{1});

  CHECK_THROWS(compare_results(base, SuiteResult{}));
}

TEST_CASE("timeout counts as not-pass in flips") {
  std::vector<TestCase> suite = parse_suite("+ p.\n");
  SuiteResult base = run_suite(parse_program("p.\n"), suite);
  RunSuiteOptions tight;
  tight.limits.max_steps = 500;
  SuiteResult cand = run_suite(parse_program("p :- p.\n"), suite, tight);
  REQUIRE(cand.results[0].outcome == TestOutcome::Timeout);
  FlipSet f = compare_results(base, cand);
  CHECK(f.to_fail == std::set<int>{0});
  CHECK(f.to_pass.empty());
}

TEST_CASE("suite_result_json lists per-test rows") {
  std::vector<TestCase> suite = parse_suite("+ duplicate([],[]).\n");
  Program p = parse_program(testutil::read_fixture("dup_buggy.pl"));
  SuiteResult r = run_suite(p, suite);
  std::string json = suite_result_json(suite, r);
  CHECK(json.find("\"id\"") != std::string::npos);
  CHECK(json.find("\"expectation\"") != std::string::npos);
  CHECK(json.find("\"outcome\"") != std::string::npos);
  CHECK(json.find("\"millis\"") != std::string::npos);
  CHECK(json.find("duplicate([],[])") != std::string::npos);
}
