// Repair search: sweep mutation order k, walk fault-localization targets in
// rank order, and accept the first mutant that flips a failing test to pass
// without breaking a passing one.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "prodbg/harness.hpp"
#include "prodbg/mutate.hpp"
#include "prodbg/sbfl.hpp"

namespace prodbg {

struct RepairConfig {
  int max_k = 2;
  int top_n_clauses = 3;
  int mutant_budget = 5000;
  long long time_budget_ms = 600000;
  int extra_body_roots = 1;
  ExecLimits limits;
  bool unknown_as_fail = false;
  unsigned jobs = 0;
};

enum class RepairStatus { Repaired, NotFound, Timeout };
const char* repair_status_name(RepairStatus s);

struct Patch {
  int clause_id = 0;
  std::string original_text;
  std::string repaired_text;
};

struct RepairResult {
  RepairStatus status = RepairStatus::NotFound;
  std::optional<Patch> patch;
  std::set<int> flipped_to_pass;
  std::set<int> flipped_to_fail;  // always empty when repaired
  std::optional<std::string> hint;
  long long candidates_tested = 0;
  std::optional<Program> repaired;
  std::string diff;  // unified diff over pretty-printed programs
  long long millis = 0;
};

RepairResult repair(const Program& p, const std::vector<TestCase>& suite,
                    const std::vector<RankedClause>& ranking,
                    const RepairConfig& cfg = {});

// Simulated perfect fault localization: explicit targets, in the given order.
RepairResult repair_targets(const Program& p,
                            const std::vector<TestCase>& suite,
                            const std::vector<int>& targets,
                            const RepairConfig& cfg = {});

struct RepairCandidate {
  Program program;
  FlipSet flips;
  int order = 0;
};

// Most tests flipped to pass; ties by fewest differing node paths against
// the original; remaining ties by enumeration order.
const RepairCandidate& select_best(const std::vector<RepairCandidate>& cands,
                                   const Program& original);

// One line per changed clause, differing subtrees abstracted to `?`.
// Throws std::invalid_argument when the programs are identical.
std::string make_hint(const Program& original, const Program& repaired);

std::string repair_json(const RepairResult& r);

}  // namespace prodbg
