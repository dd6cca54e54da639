// Spectrum-based fault localization: per-clause execution counters from
// traces and seven suspiciousness formulas over them.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "prodbg/harness.hpp"
#include "prodbg/program.hpp"

namespace prodbg {

enum class Formula {
  Tarantula,
  Ochiai,
  Jaccard,
  Barinel,
  Op2,
  DStar,
  Kulczynski,
};

const char* formula_name(Formula f);
Formula formula_from_name(const std::string& name);  // throws on unknown
const std::vector<Formula>& all_formulas();

struct ClauseSpectrum {
  long long e_p = 0;  // passing tests executing the clause
  long long e_f = 0;  // failing tests executing the clause
  long long n_p = 0;  // passing tests not executing it
  long long n_f = 0;  // failing tests not executing it
};

using Spectrum = std::map<int, ClauseSpectrum>;

struct SpectrumOptions {
  // Errored and timed-out tests are excluded by default; set to count them
  // as failing (their partial traces contribute executed clauses).
  bool errors_as_failing = false;
};

// Requires traces on every counted test; a clause is executed in a test iff
// at least one call or redo event is attributed to it.
Spectrum collect_spectrum(const SuiteResult& result, const Program& p,
                          const SpectrumOptions& opts = {});

// Zero-denominator convention: a clause executed by no test scores 0; within
// a formula 0/0 is 0 and a positive numerator over a zero denominator is
// +infinity (reachable only for DStar and Kulczynski).
double score_one(const ClauseSpectrum& s, Formula f);
std::map<int, double> score(const Spectrum& spectrum, Formula f);

struct RankedClause {
  int clause_id = 0;
  double score = 0.0;
  int rank = 0;  // 1-based position
};

// Descending score; ties broken by descending clause id (later clauses rank
// higher). Scores must cover every program clause.
std::vector<RankedClause> rank(const std::map<int, double>& scores,
                               const Program& p);

std::string ranking_json(const std::vector<RankedClause>& ranking,
                         const Spectrum& spectrum, Formula f, const Program& p);

}  // namespace prodbg
