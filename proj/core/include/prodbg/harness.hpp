// Pass/fail test suites: loading, execution under limits, and outcome
// comparison between program versions.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "prodbg/engine.hpp"
#include "prodbg/program.hpp"
#include "prodbg/term.hpp"

namespace prodbg {

enum class Expectation { Succeed, Fail };
const char* expectation_name(Expectation e);

enum class TestOutcome { Pass, Fail, Error, Timeout };
const char* outcome_name(TestOutcome o);

struct TestCase {
  int id = 0;
  std::vector<TermPtr> goal;
  Expectation expectation = Expectation::Succeed;
  std::string raw_text;  // goal text as written, without marker or period
};

struct TestResult {
  int id = 0;
  TestOutcome outcome = TestOutcome::Fail;
  SolveStatus status = SolveStatus::Failure;
  std::vector<TraceEvent> trace;
  long long millis = 0;
  std::string error;
};

struct SuiteResult {
  std::vector<TestResult> results;  // in test id order
  int passed = 0;
  int failed = 0;
  int errors = 0;
  int timeouts = 0;
};

// Suite file format: one test per line, `+ goal.` expects success and
// `- goal.` expects failure; `%` comments and blank lines are ignored.
std::vector<TestCase> parse_suite(const std::string& text);
std::vector<TestCase> load_suite(const std::string& path);

TestOutcome classify_outcome(SolveStatus status, Expectation expectation);

struct RunSuiteOptions {
  ExecLimits limits;
  bool trace = false;
  bool unknown_as_fail = false;
  unsigned jobs = 0;  // 0 = hardware concurrency
};

SuiteResult run_suite(const Program& p, const std::vector<TestCase>& suite,
                      const RunSuiteOptions& opts = {});

struct FlipSet {
  std::set<int> to_pass;
  std::set<int> to_fail;
};

// Pass-status flips from base to cand; error and timeout count as not-pass.
FlipSet compare_results(const SuiteResult& base, const SuiteResult& cand);

std::string suite_result_json(const std::vector<TestCase>& suite,
                              const SuiteResult& result);

}  // namespace prodbg
