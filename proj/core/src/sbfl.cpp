#include "prodbg/sbfl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "prodbg/pretty.hpp"

namespace prodbg {

const char* formula_name(Formula f) {
  switch (f) {
    case Formula::Tarantula: return "tarantula";
    case Formula::Ochiai: return "ochiai";
    case Formula::Jaccard: return "jaccard";
    case Formula::Barinel: return "barinel";
    case Formula::Op2: return "op2";
    case Formula::DStar: return "dstar";
    case Formula::Kulczynski: return "kulczynski";
  }
  return "?";
}

Formula formula_from_name(const std::string& name) {
  for (Formula f : all_formulas())
    if (name == formula_name(f)) return f;
  throw std::invalid_argument("unknown formula: " + name);
}

const std::vector<Formula>& all_formulas() {
  static const std::vector<Formula> fs = {
      Formula::Tarantula, Formula::Ochiai,  Formula::Jaccard,
      Formula::Barinel,   Formula::Op2,     Formula::DStar,
      Formula::Kulczynski,
  };
  return fs;
}

Spectrum collect_spectrum(const SuiteResult& result, const Program& p,
                          const SpectrumOptions& opts) {
  Spectrum sp;
  for (const Clause& c : p.clauses) sp[c.id] = ClauseSpectrum{};
  for (const TestResult& r : result.results) {
    bool counted_failing;
    switch (r.outcome) {
      case TestOutcome::Pass:
        counted_failing = false;
        break;
      case TestOutcome::Fail:
        counted_failing = true;
        break;
      default:
        if (!opts.errors_as_failing) continue;
        counted_failing = true;
        break;
    }
    if (r.trace.empty())
      throw std::invalid_argument("collect_spectrum: missing trace for test " +
                                  std::to_string(r.id));
    std::set<int> executed;
    for (const TraceEvent& e : r.trace)
      if (e.clause_id && (e.port == Port::Call || e.port == Port::Redo))
        executed.insert(*e.clause_id);
    for (auto& [cid, cs] : sp) {
      bool ex = executed.count(cid) != 0;
      if (counted_failing) {
        if (ex) ++cs.e_f; else ++cs.n_f;
      } else {
        if (ex) ++cs.e_p; else ++cs.n_p;
      }
    }
  }
  return sp;
}

namespace {

double safe_div(double num, double den) {
  if (den == 0.0)
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace

double score_one(const ClauseSpectrum& s, Formula f) {
  if (s.e_f == 0 && s.e_p == 0) return 0.0;
  double ef = static_cast<double>(s.e_f);
  double ep = static_cast<double>(s.e_p);
  double nf = static_cast<double>(s.n_f);
  double np = static_cast<double>(s.n_p);
  double F = ef + nf;
  double P = ep + np;
  switch (f) {
    case Formula::Tarantula: {
      double rf = safe_div(ef, F);
      double rp = safe_div(ep, P);
      return safe_div(rf, rf + rp);
    }
    case Formula::Ochiai:
      return safe_div(ef, std::sqrt(F * (ef + ep)));
    case Formula::Jaccard:
      return safe_div(ef, F + ep);
    case Formula::Barinel:
      return 1.0 - safe_div(ep, ep + ef);
    case Formula::Op2:
      return ef - ep / (P + 1.0);
    case Formula::DStar:
      return safe_div(ef * ef, ep + nf);
    case Formula::Kulczynski:
      return safe_div(ef, nf + ep);
  }
  return 0.0;
}

std::map<int, double> score(const Spectrum& spectrum, Formula f) {
  std::map<int, double> out;
  for (const auto& [cid, cs] : spectrum) out[cid] = score_one(cs, f);
  return out;
}

std::vector<RankedClause> rank(const std::map<int, double>& scores,
                               const Program& p) {
  std::vector<RankedClause> out;
  out.reserve(p.clauses.size());
  for (const Clause& c : p.clauses) {
    auto it = scores.find(c.id);
    if (it == scores.end())
      throw std::invalid_argument("rank: no score for clause " +
                                  std::to_string(c.id));
    out.push_back(RankedClause{c.id, it->second, 0});
  }
  std::sort(out.begin(), out.end(),
            [](const RankedClause& a, const RankedClause& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.clause_id > b.clause_id;
            });
  for (size_t i = 0; i < out.size(); ++i)
    out[i].rank = static_cast<int>(i) + 1;
  return out;
}

std::string ranking_json(const std::vector<RankedClause>& ranking,
                         const Spectrum& spectrum, Formula f,
                         const Program& p) {
  nlohmann::ordered_json doc;
  doc["formula"] = formula_name(f);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const RankedClause& rc : ranking) {
    const Clause* clause = nullptr;
    for (const Clause& c : p.clauses)
      if (c.id == rc.clause_id) clause = &c;
    nlohmann::ordered_json row;
    row["clause"] = rc.clause_id;
    if (std::isinf(rc.score))
      row["score"] = "inf";
    else
      row["score"] = rc.score;
    row["rank"] = rc.rank;
    if (clause) {
      row["text"] = pretty_clause(*clause);
      row["span"] = {clause->span.line_begin, clause->span.col_begin,
                     clause->span.line_end, clause->span.col_end};
    }
    auto it = spectrum.find(rc.clause_id);
    if (it != spectrum.end()) {
      row["e_p"] = it->second.e_p;
      row["e_f"] = it->second.e_f;
      row["n_p"] = it->second.n_p;
      row["n_f"] = it->second.n_f;
    }
    arr.push_back(std::move(row));
  }
  doc["ranking"] = std::move(arr);
  return doc.dump(2) + "\n";
}

}  // namespace prodbg
