#include "prodbg/harness.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "prodbg/parser.hpp"
#include "prodbg/pool.hpp"

namespace prodbg {

const char* expectation_name(Expectation e) {
  return e == Expectation::Succeed ? "succeed" : "fail";
}

const char* outcome_name(TestOutcome o) {
  switch (o) {
    case TestOutcome::Pass: return "pass";
    case TestOutcome::Fail: return "fail";
    case TestOutcome::Error: return "error";
    case TestOutcome::Timeout: return "timeout";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<TestCase> parse_suite(const std::string& text) {
  std::vector<TestCase> suite;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    char marker = t[0];
    if (marker != '+' && marker != '-')
      throw ParseError(lineno, 1, "test line must start with '+' or '-'");
    std::string goal_text = trim(t.substr(1));
    if (goal_text.empty())
      throw ParseError(lineno, 2, "missing test goal");
    TestCase tc;
    tc.id = static_cast<int>(suite.size());
    tc.expectation = marker == '+' ? Expectation::Succeed : Expectation::Fail;
    try {
      tc.goal = parse_query(goal_text);
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.col, e.message);
    }
    std::string raw = goal_text;
    size_t comment = std::string::npos;
    bool quoted = false;
    for (size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '\'') quoted = !quoted;
      if (raw[i] == '%' && !quoted) {
        comment = i;
        break;
      }
    }
    if (comment != std::string::npos) raw = trim(raw.substr(0, comment));
    if (!raw.empty() && raw.back() == '.') raw = trim(raw.substr(0, raw.size() - 1));
    tc.raw_text = raw;
    suite.push_back(std::move(tc));
  }
  return suite;
}

std::vector<TestCase> load_suite(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open suite file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_suite(buf.str());
}

TestOutcome classify_outcome(SolveStatus status, Expectation expectation) {
  switch (status) {
    case SolveStatus::Success:
      return expectation == Expectation::Succeed ? TestOutcome::Pass
                                                 : TestOutcome::Fail;
    case SolveStatus::Failure:
      return expectation == Expectation::Fail ? TestOutcome::Pass
                                              : TestOutcome::Fail;
    case SolveStatus::ResourceLimit:
      return TestOutcome::Timeout;
    case SolveStatus::RuntimeError:
      return TestOutcome::Error;
  }
  return TestOutcome::Error;
}

SuiteResult run_suite(const Program& p, const std::vector<TestCase>& suite,
                      const RunSuiteOptions& opts) {
  SuiteResult out;
  out.results.resize(suite.size());
  parallel_for(
      suite.size(),
      [&](size_t i) {
        const TestCase& tc = suite[i];
        EngineOptions eopts;
        eopts.limits = opts.limits;
        eopts.trace = opts.trace;
        eopts.unknown_as_fail = opts.unknown_as_fail;
        auto t0 = std::chrono::steady_clock::now();
        QueryOutcome q = solve(p, tc.goal, eopts);
        auto t1 = std::chrono::steady_clock::now();
        TestResult r;
        r.id = tc.id;
        r.status = q.status;
        r.outcome = classify_outcome(q.status, tc.expectation);
        r.trace = std::move(q.trace);
        r.error = std::move(q.error);
        r.millis = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                       .count();
        out.results[i] = std::move(r);
      },
      opts.jobs);
  for (const TestResult& r : out.results) {
    switch (r.outcome) {
      case TestOutcome::Pass: ++out.passed; break;
      case TestOutcome::Fail: ++out.failed; break;
      case TestOutcome::Error: ++out.errors; break;
      case TestOutcome::Timeout: ++out.timeouts; break;
    }
  }
  return out;
}

FlipSet compare_results(const SuiteResult& base, const SuiteResult& cand) {
  if (base.results.size() != cand.results.size())
    throw std::invalid_argument("compare_results: suite size mismatch");
  FlipSet flips;
  for (size_t i = 0; i < base.results.size(); ++i) {
    const TestResult& b = base.results[i];
    const TestResult& c = cand.results[i];
    if (b.id != c.id)
      throw std::invalid_argument("compare_results: test id mismatch");
    bool bp = b.outcome == TestOutcome::Pass;
    bool cp = c.outcome == TestOutcome::Pass;
    if (!bp && cp) flips.to_pass.insert(b.id);
    if (bp && !cp) flips.to_fail.insert(b.id);
  }
  return flips;
}

std::string suite_result_json(const std::vector<TestCase>& suite,
                              const SuiteResult& result) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (size_t i = 0; i < result.results.size(); ++i) {
    const TestResult& r = result.results[i];
    nlohmann::ordered_json row;
    row["id"] = r.id;
    row["text"] = i < suite.size() ? suite[i].raw_text : "";
    row["expectation"] =
        i < suite.size() ? expectation_name(suite[i].expectation) : "";
    row["outcome"] = outcome_name(r.outcome);
    row["millis"] = r.millis;
    arr.push_back(std::move(row));
  }
  return arr.dump(2) + "\n";
}

}  // namespace prodbg
