// Seeded fault injection: buggy variants of a correct program with known
// ground-truth clauses, plus quality metrics for rankings over them.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "prodbg/harness.hpp"
#include "prodbg/program.hpp"
#include "prodbg/sbfl.hpp"

namespace prodbg {

struct BuggyInstance {
  Program buggy;
  Program fixed;               // the original correct program
  std::set<int> ground_truth;  // edited clause ids in `buggy`
  std::vector<TestCase> suite;
  std::string recipe;  // human-readable description of the applied edits
  std::uint64_t seed = 0;
};

struct InjectOptions {
  ExecLimits limits;
  bool unknown_as_fail = false;
  unsigned jobs = 0;
  int max_retries = 200;  // whole-instance redraws
  int mutant_pool = 200;  // enumeration budget when drawing engine mutants
};

// Applies n_bugs random edits (engine mutants at distance 1, comparison
// flips, off-by-one constants, variable swaps, body-goal deletion, and
// head-argument abstraction) and redraws until at least one test fails.
// Directives are never touched and no clause is ever removed, so every
// predicate survives. The same seed reproduces the same instance. Throws
// std::invalid_argument for n_bugs < 1 and std::runtime_error when the
// retry budget runs out (an empty suite can never fail, so it exhausts).
BuggyInstance inject_bugs(const Program& correct,
                          const std::vector<TestCase>& suite, int n_bugs,
                          std::uint64_t seed, const InjectOptions& opts = {});

// Clauses of `buggy` with no structurally identical counterpart in `fixed`,
// aligned per predicate by position; surplus clauses count as modified. The
// result is restricted to predicates reachable from the goals of
// `newly_passed` through the call graph of `buggy`.
std::set<int> ground_truth(const Program& buggy, const Program& fixed,
                           const std::vector<TestCase>& newly_passed);

struct FLQuality {
  int min_rank = 0;  // first 1-based rank holding a ground-truth clause
  std::map<int, double> acc_at_k;
  double expense = 0.0;  // 100 * min_rank / #clauses
};

struct QualityOptions {
  // acc@k defaults to |truth in top k| / |truth|; set for the 0/1 variant
  // that only asks whether any ground-truth clause made the top k.
  bool at_least_one = false;
};

// Throws std::invalid_argument when `truth` is empty or names a clause the
// ranking does not cover.
FLQuality fl_quality(const std::vector<RankedClause>& ranking,
                     const std::set<int>& truth, const std::vector<int>& ks,
                     const QualityOptions& opts = {});

// One JSON line per instance: file paths, ground-truth ids, seed, recipe.
std::string manifest_line(const BuggyInstance& inst,
                          const std::string& buggy_path,
                          const std::string& fixed_path,
                          const std::string& suite_path);

// {per_instance, aggregate}; the aggregate carries min_rank_mean, acc@1,
// acc@3, acc@5, acc@10, expense_mean and timeout_pct. Timed-out instances
// are excluded from the averages and only counted in timeout_pct.
std::string quality_report_json(const std::vector<FLQuality>& per_instance,
                                int timeout_count);

}  // namespace prodbg
