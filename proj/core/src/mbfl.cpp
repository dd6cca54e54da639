#include "prodbg/mbfl.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "prodbg/pool.hpp"

namespace prodbg {

std::vector<Mutant> generate_mutants(const Program& p, int clause_id,
                                     int budget) {
  if (budget <= 0) return {};
  EnumOptions opts;
  opts.budget = budget;
  return mutants_for_clause(p, clause_id, 1, MutMode::FL, 0, opts).mutants;
}

KillMatrix kill_matrix(const Program& p, const std::vector<Mutant>& mutants,
                       const std::vector<TestCase>& suite,
                       const SuiteResult& base, const MbflOptions& opts) {
  (void)p;
  if (base.results.size() != suite.size())
    throw std::invalid_argument("kill_matrix: base run does not match suite");

  KillMatrix km;
  km.mutants = mutants;
  for (const auto& t : suite) km.test_ids.push_back(t.id);
  km.base_pass.resize(suite.size());
  for (std::size_t t = 0; t < suite.size(); ++t) {
    bool pass = base.results[t].outcome == TestOutcome::Pass;
    km.base_pass[t] = pass;
    (pass ? km.passing_total : km.failing_total) += 1;
  }

  km.killed.assign(mutants.size(), std::vector<char>(suite.size(), 0));
  RunSuiteOptions run_opts;
  run_opts.limits = opts.limits;
  run_opts.unknown_as_fail = opts.unknown_as_fail;
  run_opts.jobs = 1;  // parallelism is across mutants
  parallel_for(
      mutants.size(),
      [&](std::size_t m) {
        SuiteResult r = run_suite(mutants[m].program, suite, run_opts);
        for (std::size_t t = 0; t < suite.size(); ++t) {
          bool pass = r.results[t].outcome == TestOutcome::Pass;
          km.killed[m][t] = pass != static_cast<bool>(km.base_pass[t]);
        }
      },
      opts.jobs);
  return km;
}

namespace {

struct MutantFlips {
  long long kf = 0, kp = 0;  // kills among failing / passing tests
};

MutantFlips flips_of(const KillMatrix& km, std::size_t m) {
  MutantFlips f;
  for (std::size_t t = 0; t < km.killed[m].size(); ++t)
    if (km.killed[m][t]) (km.base_pass[t] ? f.kp : f.kf) += 1;
  return f;
}

}  // namespace

std::map<int, double> metallaxis_scores(const KillMatrix& km,
                                        const Program& p) {
  std::map<int, double> out;
  for (const auto& c : p.clauses) out[c.id] = 0.0;
  for (std::size_t m = 0; m < km.mutants.size(); ++m) {
    auto f = flips_of(km, m);
    double s = 0.0;
    double denom_sq =
        static_cast<double>(km.failing_total) * static_cast<double>(f.kf + f.kp);
    if (f.kf > 0 && denom_sq > 0) s = static_cast<double>(f.kf) / std::sqrt(denom_sq);
    auto it = out.find(km.mutants[m].origin_clause);
    if (it != out.end() && s > it->second) it->second = s;
  }
  return out;
}

std::map<int, double> muse_scores(const KillMatrix& km, const Program& p) {
  long long f2p_total = 0, p2f_total = 0;
  std::vector<MutantFlips> flips(km.mutants.size());
  for (std::size_t m = 0; m < km.mutants.size(); ++m) {
    flips[m] = flips_of(km, m);
    f2p_total += flips[m].kf;  // a killed failing test now passes
    p2f_total += flips[m].kp;
  }
  double alpha = 0.0;
  if (p2f_total > 0 && km.passing_total > 0 && km.failing_total > 0)
    alpha = (static_cast<double>(f2p_total) / km.failing_total) *
            (static_cast<double>(km.passing_total) / p2f_total);

  std::map<int, double> out;
  std::map<int, std::pair<double, long long>> acc;  // clause -> (sum, count)
  for (const auto& c : p.clauses) {
    out[c.id] = 0.0;
    acc[c.id] = {0.0, 0};
  }
  for (std::size_t m = 0; m < km.mutants.size(); ++m) {
    auto it = acc.find(km.mutants[m].origin_clause);
    if (it == acc.end()) continue;
    double f2p_term = km.failing_total > 0
                          ? static_cast<double>(flips[m].kf) / km.failing_total
                          : 0.0;
    double p2f_term = km.passing_total > 0
                          ? static_cast<double>(flips[m].kp) / km.passing_total
                          : 0.0;
    it->second.first += f2p_term - alpha * p2f_term;
    it->second.second += 1;
  }
  for (const auto& [cid, sc] : acc)
    if (sc.second > 0) out[cid] = sc.first / static_cast<double>(sc.second);
  return out;
}

std::string kill_matrix_csv(const KillMatrix& km) {
  std::ostringstream os;
  os << "clause,mutant";
  for (int id : km.test_ids) os << ",t" << id;
  os << "\n";
  for (std::size_t m = 0; m < km.mutants.size(); ++m) {
    std::string text = km.mutants[m].text;
    std::string quoted;
    quoted.reserve(text.size() + 2);
    quoted.push_back('"');
    for (char ch : text) {
      if (ch == '"') quoted.push_back('"');
      quoted.push_back(ch);
    }
    quoted.push_back('"');
    os << km.mutants[m].origin_clause << "," << quoted;
    for (std::size_t t = 0; t < km.killed[m].size(); ++t)
      os << "," << (km.killed[m][t] ? 1 : 0);
    os << "\n";
  }
  return os.str();
}

}  // namespace prodbg
