// Mutation-based fault localization: run each mutant against the suite, mark
// kills as pass-status flips, and score clauses with MUSE and Metallaxis.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "prodbg/harness.hpp"
#include "prodbg/mutate.hpp"
#include "prodbg/program.hpp"

namespace prodbg {

struct KillMatrix {
  std::vector<Mutant> mutants;
  std::vector<int> test_ids;
  std::vector<std::vector<char>> killed;  // [mutant][test]
  std::vector<char> base_pass;            // pass-status per test, base run
  int failing_total = 0;                  // |F| on the original program
  int passing_total = 0;                  // |P| on the original program
};

// Single-clause k=1 mutants, in enumeration-stream order.
std::vector<Mutant> generate_mutants(const Program& p, int clause_id,
                                     int budget = 500);

struct MbflOptions {
  ExecLimits limits;
  bool unknown_as_fail = false;
  unsigned jobs = 0;  // 0 = hardware concurrency, spread across mutants
};

// killed(m,t) holds iff t's pass-status on the mutant differs from the base
// run; error and timeout count as not-pass on both sides.
KillMatrix kill_matrix(const Program& p, const std::vector<Mutant>& mutants,
                       const std::vector<TestCase>& suite,
                       const SuiteResult& base, const MbflOptions& opts = {});

// Per mutant kf/sqrt(|F|*(kf+kp)), 0 on a zero denominator; per clause the
// max over its mutants, 0 for clauses without mutants.
std::map<int, double> metallaxis_scores(const KillMatrix& km,
                                        const Program& p);

// Per clause the mean over its mutants of f2p/|F| - alpha*p2f/|P|, where
// alpha = (f2p_total/|F|)*(|P|/p2f_total) over all mutants and is 0 whenever
// p2f_total or |P| is 0; zero-denominator terms contribute 0.
std::map<int, double> muse_scores(const KillMatrix& km, const Program& p);

// Rows are mutants (origin clause plus rendered clause), columns test ids,
// cells 0/1 kill flags.
std::string kill_matrix_csv(const KillMatrix& km);

}  // namespace prodbg
