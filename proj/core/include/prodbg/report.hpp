// End-to-end pipeline: test, localize, repair, measure, and render the
// student-facing report in text or JSON.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "prodbg/config.hpp"
#include "prodbg/harness.hpp"
#include "prodbg/program.hpp"
#include "prodbg/repair.hpp"
#include "prodbg/sbfl.hpp"

namespace prodbg {

struct ProgramMetrics {
  int clause_count = 0;
  int predicate_count = 0;
  double avg_clause_length = 0.0;  // goals per clause, head included
  std::map<std::string, int> clauses_per_predicate;
  double clauses_per_predicate_mean = 0.0;
  int max_nesting_depth = 0;
};

ProgramMetrics program_metrics(const Program& p);

// Ranking for one localization method ("sbfl", "mbfl" or "llm") over an
// already-run suite. formula_out names the formula when the method has one;
// note_out carries a diagnostic when the model endpoint was skipped (the
// fallback is the pure reverse-source-order ranking).
std::vector<RankedClause> fl_ranking(const Program& p,
                                     const std::vector<TestCase>& suite,
                                     const SuiteResult& base, const Config& cfg,
                                     const std::string& method,
                                     std::string& formula_out,
                                     std::string& note_out);

struct Report {
  Program program;
  std::vector<TestCase> suite;
  SuiteResult tests;
  bool all_pass = false;

  bool fl_ran = false;
  std::string fl_method;
  std::string fl_formula;  // empty when the method has no formula
  std::vector<RankedClause> ranking;
  std::string fl_note;  // e.g. model endpoint unavailable

  bool repair_ran = false;
  RepairResult repair;

  ProgramMetrics metrics;

  long long test_ms = 0;
  long long fl_ms = 0;
  long long repair_ms = 0;
  long long total_ms = 0;
};

struct PipelineResult {
  Report report;
  int exit_code = 0;  // 0 all tests pass, 1 failures reported, 2 tool error
  std::string error;  // diagnostic when exit_code is 2
};

// Runs test -> localize -> repair -> metrics under the global wall budget;
// correct submissions short-circuit after the test stage, and when the
// budget expires the report carries whatever stages completed. I/O and
// parse problems come back as exit code 2, never as exceptions.
PipelineResult run_pipeline(const std::string& program_path,
                            const std::string& suite_path, const Config& cfg);

// Valid sections: tests, fl, repair_hint, repair_full_diff, metrics; any
// other name throws std::invalid_argument. Format is "text" or "json".
// With zero_timing all timing fields render as 0 for byte-stable output.
// repair_hint never reveals repaired clause text; only repair_full_diff
// does.
std::string render_report(const Report& r,
                          const std::vector<std::string>& sections,
                          const std::string& format, bool zero_timing);

std::string render_report(const Report& r, const Config& cfg);

}  // namespace prodbg
