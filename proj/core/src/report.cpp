#include "prodbg/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include "prodbg/llm.hpp"
#include "prodbg/mbfl.hpp"
#include "prodbg/mutate.hpp"
#include "prodbg/parser.hpp"
#include "prodbg/pretty.hpp"

namespace prodbg {

namespace {

using Clock = std::chrono::steady_clock;

long long ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               t0)
      .count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<RankedClause> llm_ranking(const Program& p, const Config& cfg,
                                      std::string& note) {
  try {
    std::string description = cfg.llm_description_path.empty()
                                  ? "(no description provided)"
                                  : read_file(cfg.llm_description_path);
    Program reference = cfg.llm_reference_path.empty()
                            ? p
                            : parse_program(read_file(cfg.llm_reference_path));
    PromptBundle bundle = build_fl_prompt(description, reference, p);
    std::vector<std::string> texts = query_model(cfg.llm, bundle);
    return parse_fl_response(texts.front(), p);
  } catch (const std::exception& e) {
    note = std::string("model unavailable (") + e.what() +
           "); fallback ranking in reverse source order";
    return parse_fl_response("", p);
  }
}

nlohmann::ordered_json json_score(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

struct Sections {
  bool tests = false;
  bool fl = false;
  bool repair_hint = false;
  bool repair_full_diff = false;
  bool metrics = false;
};

Sections check_sections(const std::vector<std::string>& names) {
  Sections s;
  for (const std::string& n : names) {
    if (n == "tests")
      s.tests = true;
    else if (n == "fl")
      s.fl = true;
    else if (n == "repair_hint")
      s.repair_hint = true;
    else if (n == "repair_full_diff")
      s.repair_full_diff = true;
    else if (n == "metrics")
      s.metrics = true;
    else
      throw std::invalid_argument("render_report: unknown section " + n);
  }
  return s;
}

std::string fmt_real(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

const Clause* clause_by_id(const Program& p, int id) {
  for (const Clause& c : p.clauses)
    if (c.id == id) return &c;
  return nullptr;
}

std::string render_text(const Report& r, const Sections& s, bool zero) {
  std::ostringstream o;
  o << r.tests.passed << "/" << r.suite.size() << " tests passed\n";

  if (s.tests) {
    o << "\nTests\n-----\n";
    for (std::size_t i = 0; i < r.suite.size(); ++i) {
      const TestCase& t = r.suite[i];
      const TestResult& res = r.tests.results[i];
      o << "  [" << t.id << "] " << outcome_name(res.outcome) << "  "
        << (t.expectation == Expectation::Succeed ? "+" : "-") << " "
        << t.raw_text << ".\n";
    }
  }

  if (s.fl) {
    o << "\nFault localization\n------------------\n";
    if (!r.fl_ran) {
      o << "  (not run: "
        << (r.all_pass ? "all tests passed" : "time budget exhausted")
        << ")\n";
    } else {
      o << "  method: " << r.fl_method;
      if (!r.fl_formula.empty()) o << " (" << r.fl_formula << ")";
      o << "\n";
      if (!r.fl_note.empty()) o << "  note: " << r.fl_note << "\n";
      int shown = 0;
      for (const RankedClause& rc : r.ranking) {
        if (shown++ == 3) break;
        const Clause* c = clause_by_id(r.program, rc.clause_id);
        o << "  " << rc.rank << ". clause " << rc.clause_id << " (line "
          << (c ? c->span.line_begin : 0) << ")  score ";
        if (std::isinf(rc.score))
          o << (rc.score > 0 ? "inf" : "-inf");
        else
          o << fmt_real(rc.score);
        o << "  " << (c ? pretty_clause(*c) : "") << "\n";
      }
    }
  }

  if (s.repair_hint || s.repair_full_diff) {
    o << "\nRepair\n------\n";
    if (!r.repair_ran) {
      o << "  (not run: "
        << (r.all_pass ? "all tests passed" : "time budget exhausted")
        << ")\n";
    } else {
      o << "  status: " << repair_status_name(r.repair.status) << "\n";
      if (r.repair.patch) {
        const Clause* c = clause_by_id(r.program, r.repair.patch->clause_id);
        o << "  clause " << r.repair.patch->clause_id << " (line "
          << (c ? c->span.line_begin : 0) << ") should be revised";
        if (s.repair_hint && r.repair.hint)
          o << ":\n    " << *r.repair.hint << "\n";
        else
          o << ".\n";
        if (!r.repair.flipped_to_pass.empty()) {
          o << "  tests fixed:";
          for (int id : r.repair.flipped_to_pass) o << " " << id;
          o << "\n";
        }
        if (s.repair_full_diff && !r.repair.diff.empty()) {
          o << "  diff:\n";
          std::istringstream d(r.repair.diff);
          std::string line;
          while (std::getline(d, line)) o << "    " << line << "\n";
        }
      }
      o << "  candidates tested: " << r.repair.candidates_tested << "\n";
    }
  }

  if (s.metrics) {
    const ProgramMetrics& m = r.metrics;
    o << "\nMetrics\n-------\n";
    o << "  clauses: " << m.clause_count << "\n";
    o << "  predicates: " << m.predicate_count << "\n";
    o << "  avg clause length: " << fmt_real(m.avg_clause_length) << "\n";
    o << "  clauses per predicate (mean " << fmt_real(m.clauses_per_predicate_mean)
      << "):";
    for (const auto& [k, v] : m.clauses_per_predicate)
      o << " " << k << "=" << v;
    o << "\n";
    o << "  max nesting depth: " << m.max_nesting_depth << "\n";
  }

  o << "\nTiming\n------\n";
  o << "  test: " << (zero ? 0 : r.test_ms)
    << " ms, localization: " << (zero ? 0 : r.fl_ms)
    << " ms, repair: " << (zero ? 0 : r.repair_ms)
    << " ms, total: " << (zero ? 0 : r.total_ms) << " ms\n";
  return o.str();
}

std::string render_json(const Report& r, const Sections& s, bool zero) {
  nlohmann::ordered_json j;

  if (s.tests) {
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.suite.size(); ++i) {
      const TestCase& t = r.suite[i];
      const TestResult& res = r.tests.results[i];
      results.push_back(
          {{"id", t.id},
           {"text", t.raw_text},
           {"expectation", expectation_name(t.expectation)},
           {"outcome", outcome_name(res.outcome)},
           {"millis", zero ? 0 : res.millis}});
    }
    j["tests"] = {{"total", r.suite.size()},
                  {"passed", r.tests.passed},
                  {"failed", r.tests.failed},
                  {"errors", r.tests.errors},
                  {"timeouts", r.tests.timeouts},
                  {"results", results}};
  } else {
    j["tests"] = nullptr;
  }

  if (s.fl && r.fl_ran) {
    nlohmann::ordered_json ranking = nlohmann::ordered_json::array();
    for (const RankedClause& rc : r.ranking) {
      const Clause* c = clause_by_id(r.program, rc.clause_id);
      ranking.push_back({{"clause", rc.clause_id},
                         {"score", json_score(rc.score)},
                         {"rank", rc.rank},
                         {"line", c ? c->span.line_begin : 0}});
    }
    j["localization"] = {
        {"method", r.fl_method},
        {"formula", r.fl_formula.empty()
                        ? nlohmann::ordered_json(nullptr)
                        : nlohmann::ordered_json(r.fl_formula)},
        {"note", r.fl_note.empty() ? nlohmann::ordered_json(nullptr)
                                   : nlohmann::ordered_json(r.fl_note)},
        {"ranking", ranking}};
  } else {
    j["localization"] = nullptr;
  }

  if ((s.repair_hint || s.repair_full_diff) && r.repair_ran) {
    nlohmann::ordered_json rep;
    rep["status"] = repair_status_name(r.repair.status);
    if (r.repair.patch)
      rep["clause"] = r.repair.patch->clause_id;
    else
      rep["clause"] = nullptr;
    if (s.repair_hint && r.repair.hint)
      rep["hint"] = *r.repair.hint;
    else
      rep["hint"] = nullptr;
    if (s.repair_full_diff && !r.repair.diff.empty())
      rep["diff"] = r.repair.diff;
    else
      rep["diff"] = nullptr;
    rep["flipped_to_pass"] = std::vector<int>(r.repair.flipped_to_pass.begin(),
                                              r.repair.flipped_to_pass.end());
    rep["candidates_tested"] = r.repair.candidates_tested;
    rep["millis"] = zero ? 0 : r.repair.millis;
    j["repair"] = rep;
  } else {
    j["repair"] = nullptr;
  }

  if (s.metrics) {
    const ProgramMetrics& m = r.metrics;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.clauses_per_predicate) per[k] = v;
    j["metrics"] = {{"clause_count", m.clause_count},
                    {"predicate_count", m.predicate_count},
                    {"avg_clause_length", m.avg_clause_length},
                    {"clauses_per_predicate", per},
                    {"clauses_per_predicate_mean", m.clauses_per_predicate_mean},
                    {"max_nesting_depth", m.max_nesting_depth}};
  } else {
    j["metrics"] = nullptr;
  }

  j["timing"] = {{"test_ms", zero ? 0 : r.test_ms},
                 {"fl_ms", zero ? 0 : r.fl_ms},
                 {"repair_ms", zero ? 0 : r.repair_ms},
                 {"total_ms", zero ? 0 : r.total_ms}};
  return j.dump(2) + "\n";
}

}  // namespace

std::vector<RankedClause> fl_ranking(const Program& p,
                                     const std::vector<TestCase>& suite,
                                     const SuiteResult& base, const Config& cfg,
                                     const std::string& method,
                                     std::string& formula_out,
                                     std::string& note_out) {
  formula_out.clear();
  note_out.clear();
  if (method == "mbfl") {
    formula_out = cfg.mbfl_formula;
    std::vector<Mutant> mutants;
    for (const Clause& c : p.clauses) {
      std::vector<Mutant> ms = generate_mutants(p, c.id, cfg.mbfl_budget);
      mutants.insert(mutants.end(), ms.begin(), ms.end());
    }
    MbflOptions mo;
    mo.limits = cfg.limits;
    mo.unknown_as_fail = cfg.unknown_as_fail;
    mo.jobs = cfg.jobs;
    KillMatrix km = kill_matrix(p, mutants, suite, base, mo);
    std::map<int, double> scores = cfg.mbfl_formula == "muse"
                                       ? muse_scores(km, p)
                                       : metallaxis_scores(km, p);
    return rank(scores, p);
  }
  if (method == "llm") return llm_ranking(p, cfg, note_out);
  if (method != "sbfl")
    throw std::invalid_argument("fl_ranking: unknown method " + method);
  formula_out = formula_name(cfg.sbfl_formula);
  SpectrumOptions so;
  so.errors_as_failing = cfg.errors_as_failing;
  Spectrum sp = collect_spectrum(base, p, so);
  return rank(score(sp, cfg.sbfl_formula), p);
}

ProgramMetrics program_metrics(const Program& p) {
  ProgramMetrics m;
  m.clause_count = static_cast<int>(p.clauses.size());
  m.predicate_count = static_cast<int>(p.predicate_index.size());
  if (!p.clauses.empty()) {
    long long goals = 0;
    for (const Clause& c : p.clauses) {
      goals += 1 + static_cast<long long>(c.body.size());
      int d = term_depth(c.head);
      for (const TermPtr& g : c.body) d = std::max(d, term_depth(g));
      m.max_nesting_depth = std::max(m.max_nesting_depth, d);
    }
    m.avg_clause_length =
        static_cast<double>(goals) / static_cast<double>(p.clauses.size());
  }
  for (const auto& [key, ids] : p.predicate_index)
    m.clauses_per_predicate[pred_key_str(key)] = static_cast<int>(ids.size());
  if (m.predicate_count)
    m.clauses_per_predicate_mean = static_cast<double>(m.clause_count) /
                                   static_cast<double>(m.predicate_count);
  return m;
}

PipelineResult run_pipeline(const std::string& program_path,
                            const std::string& suite_path, const Config& cfg) {
  PipelineResult out;
  Clock::time_point t0 = Clock::now();
  Report& r = out.report;
  try {
    r.program = parse_program(read_file(program_path));
    r.suite = load_suite(suite_path);
  } catch (const std::exception& e) {
    out.exit_code = 2;
    out.error = e.what();
    return out;
  }
  r.metrics = program_metrics(r.program);

  RunSuiteOptions ro;
  ro.limits = cfg.limits;
  ro.trace = true;
  ro.unknown_as_fail = cfg.unknown_as_fail;
  ro.jobs = cfg.jobs;
  Clock::time_point ts = Clock::now();
  r.tests = run_suite(r.program, r.suite, ro);
  r.test_ms = ms_since(ts);
  r.all_pass = r.tests.passed == static_cast<int>(r.suite.size());
  if (r.all_pass) {
    r.total_ms = ms_since(t0);
    out.exit_code = 0;
    return out;
  }

  auto remaining = [&] { return cfg.wall_budget_ms - ms_since(t0); };

  if (remaining() > 0) {
    Clock::time_point fs = Clock::now();
    r.fl_ran = true;
    r.fl_method = cfg.fl_method;
    r.ranking = fl_ranking(r.program, r.suite, r.tests, cfg, cfg.fl_method,
                           r.fl_formula, r.fl_note);
    r.fl_ms = ms_since(fs);
  }

  if (r.fl_ran && remaining() > 0) {
    RepairConfig rc = cfg.repair;
    rc.limits = cfg.limits;
    rc.unknown_as_fail = cfg.unknown_as_fail;
    rc.jobs = cfg.jobs;
    rc.time_budget_ms = std::min(rc.time_budget_ms, remaining());
    Clock::time_point rs = Clock::now();
    r.repair = repair(r.program, r.suite, r.ranking, rc);
    r.repair_ran = true;
    r.repair_ms = ms_since(rs);
  }

  r.total_ms = ms_since(t0);
  out.exit_code = 1;
  return out;
}

std::string render_report(const Report& r,
                          const std::vector<std::string>& sections,
                          const std::string& format, bool zero_timing) {
  Sections s = check_sections(sections);
  if (format == "text") return render_text(r, s, zero_timing);
  if (format == "json") return render_json(r, s, zero_timing);
  throw std::invalid_argument("render_report: unknown format " + format);
}

std::string render_report(const Report& r, const Config& cfg) {
  return render_report(r, cfg.report_sections, cfg.report_format,
                       cfg.zero_timing);
}

}  // namespace prodbg
