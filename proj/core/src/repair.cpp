#include "prodbg/repair.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "prodbg/diff.hpp"
#include "prodbg/pool.hpp"
#include "prodbg/pretty.hpp"
#include "prodbg/textdiff.hpp"

namespace prodbg {

const char* repair_status_name(RepairStatus s) {
  switch (s) {
    case RepairStatus::Repaired: return "repaired";
    case RepairStatus::NotFound: return "not_found";
    case RepairStatus::Timeout: return "timeout";
  }
  return "?";
}

namespace {

long long edit_count(const Program& a, const Program& b) {
  long long total = 0;
  std::size_t n = std::max(a.clauses.size(), b.clauses.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= a.clauses.size()) {
      total += 1 + static_cast<long long>(b.clauses[i].body.size());
    } else if (i >= b.clauses.size()) {
      total += 1 + static_cast<long long>(a.clauses[i].body.size());
    } else {
      total += static_cast<long long>(
          clause_diff(a.clauses[i], b.clauses[i]).size());
    }
  }
  return total;
}

}  // namespace

const RepairCandidate& select_best(const std::vector<RepairCandidate>& cands,
                                   const Program& original) {
  if (cands.empty())
    throw std::invalid_argument("select_best: no candidates");
  const RepairCandidate* best = &cands[0];
  long long best_edit = edit_count(original, best->program);
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const RepairCandidate& c = cands[i];
    long long e = edit_count(original, c.program);
    bool better;
    if (c.flips.to_pass.size() != best->flips.to_pass.size())
      better = c.flips.to_pass.size() > best->flips.to_pass.size();
    else if (e != best_edit)
      better = e < best_edit;
    else
      better = c.order < best->order;
    if (better) {
      best = &c;
      best_edit = e;
    }
  }
  return *best;
}

std::string make_hint(const Program& original, const Program& repaired) {
  if (original.clauses.size() != repaired.clauses.size())
    throw std::invalid_argument("make_hint: clause counts differ");
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < original.clauses.size(); ++i) {
    const Clause& a = original.clauses[i];
    const Clause& b = repaired.clauses[i];
    if (clause_diff(a, b).empty()) continue;
    lines.push_back(pretty_clause(abstract_hint(a, b)));
  }
  if (lines.empty())
    throw std::invalid_argument("make_hint: programs are identical");
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += "\n";
    out += lines[i];
  }
  return out;
}

RepairResult repair_targets(const Program& p,
                            const std::vector<TestCase>& suite,
                            const std::vector<int>& targets,
                            const RepairConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };
  int max_k = std::max(1, cfg.max_k);
  int budget = std::max(1, cfg.mutant_budget);
  int extra = std::max(0, cfg.extra_body_roots);

  RepairResult res;
  RunSuiteOptions base_opts;
  base_opts.limits = cfg.limits;
  base_opts.unknown_as_fail = cfg.unknown_as_fail;
  base_opts.jobs = cfg.jobs;
  SuiteResult base = run_suite(p, suite, base_opts);
  if (base.passed == static_cast<int>(suite.size())) {
    res.status = RepairStatus::NotFound;
    res.millis = elapsed();
    return res;
  }

  RunSuiteOptions cand_opts = base_opts;
  cand_opts.jobs = 1;  // parallelism is across candidates

  for (int k = 1; k <= max_k; ++k) {
    for (int target : targets) {
      if (elapsed() >= cfg.time_budget_ms) {
        res.status = RepairStatus::Timeout;
        res.millis = elapsed();
        return res;
      }
      EnumOptions eo;
      eo.budget = budget;
      EnumResult er;
      try {
        er = mutants_for_clause(p, target, k, MutMode::Repair, extra, eo);
      } catch (const std::invalid_argument&) {
        continue;  // clause too small for this k, or no such clause
      }
      const std::size_t batch = 32;
      for (std::size_t off = 0; off < er.mutants.size(); off += batch) {
        if (elapsed() >= cfg.time_budget_ms) {
          res.status = RepairStatus::Timeout;
          res.millis = elapsed();
          return res;
        }
        std::size_t cnt = std::min(batch, er.mutants.size() - off);
        std::vector<FlipSet> flips(cnt);
        parallel_for(
            cnt,
            [&](std::size_t i) {
              SuiteResult r =
                  run_suite(er.mutants[off + i].program, suite, cand_opts);
              flips[i] = compare_results(base, r);
            },
            cfg.jobs);
        res.candidates_tested += static_cast<long long>(cnt);
        for (std::size_t i = 0; i < cnt; ++i) {
          if (flips[i].to_pass.empty() || !flips[i].to_fail.empty()) continue;
          const Mutant& m = er.mutants[off + i];
          const Clause* oc = nullptr;
          for (const auto& c : p.clauses)
            if (c.id == target) oc = &c;
          res.status = RepairStatus::Repaired;
          res.flipped_to_pass = flips[i].to_pass;
          res.patch = Patch{target, oc ? pretty_clause(*oc) : "",
                            pretty_clause(m.clause)};
          res.repaired = m.program;
          res.hint = make_hint(p, m.program);
          res.diff = make_unified_diff(pretty_program(p),
                                       pretty_program(m.program), "original",
                                       "repaired");
          res.millis = elapsed();
          return res;
        }
      }
    }
  }
  res.status = RepairStatus::NotFound;
  res.millis = elapsed();
  return res;
}

RepairResult repair(const Program& p, const std::vector<TestCase>& suite,
                    const std::vector<RankedClause>& ranking,
                    const RepairConfig& cfg) {
  int top_n = std::max(1, cfg.top_n_clauses);
  std::vector<int> targets;
  for (const auto& rc : ranking) {
    if (static_cast<int>(targets.size()) >= top_n) break;
    targets.push_back(rc.clause_id);
  }
  return repair_targets(p, suite, targets, cfg);
}

std::string repair_json(const RepairResult& r) {
  nlohmann::ordered_json j;
  j["status"] = repair_status_name(r.status);
  if (r.patch)
    j["clause"] = r.patch->clause_id;
  else
    j["clause"] = nullptr;
  j["diff"] = r.diff;
  if (r.hint)
    j["hint"] = *r.hint;
  else
    j["hint"] = nullptr;
  j["flipped_to_pass"] =
      std::vector<int>(r.flipped_to_pass.begin(), r.flipped_to_pass.end());
  j["candidates_tested"] = r.candidates_tested;
  j["millis"] = r.millis;
  return j.dump(2) + "\n";
}

}  // namespace prodbg
