// prodbg: test, localize, repair and report on Prolog submissions.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>
#include "prodbg/config.hpp"
#include "prodbg/corpus.hpp"
#include "prodbg/harness.hpp"
#include "prodbg/llm.hpp"
#include "prodbg/parser.hpp"
#include "prodbg/pretty.hpp"
#include "prodbg/repair.hpp"
#include "prodbg/report.hpp"
#include "prodbg/sbfl.hpp"

namespace fs = std::filesystem;
using namespace prodbg;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

Program load_program(const std::string& path) {
  return parse_program(read_file(path));
}

std::vector<int> parse_id_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size())
      throw std::invalid_argument("bad clause id: " + tok);
    out.push_back(v);
  }
  return out;
}

// "perfect:1,2" puts the listed clauses first, the rest in reverse source
// order, mirroring the fallback convention.
std::vector<RankedClause> perfect_ranking(const Program& p,
                                          const std::string& ids) {
  std::vector<int> listed = parse_id_list(ids);
  std::vector<char> used(p.clauses.size(), 0);
  std::vector<int> order;
  for (int id : listed) {
    if (id < 0 || id >= static_cast<int>(p.clauses.size()))
      throw std::invalid_argument("perfect ranking names unknown clause " +
                                  std::to_string(id));
    if (!used[id]) {
      used[id] = 1;
      order.push_back(id);
    }
  }
  for (int id = static_cast<int>(p.clauses.size()) - 1; id >= 0; --id)
    if (!used[id]) order.push_back(id);
  std::vector<RankedClause> out;
  int n = static_cast<int>(order.size());
  for (int i = 0; i < n; ++i)
    out.push_back({order[i], static_cast<double>(n - i), i + 1});
  return out;
}

void print_suite_text(const std::vector<TestCase>& suite,
                      const SuiteResult& r) {
  std::cout << r.passed << "/" << suite.size() << " tests passed\n";
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const TestCase& t = suite[i];
    std::cout << "  [" << t.id << "] " << outcome_name(r.results[i].outcome)
              << "  " << (t.expectation == Expectation::Succeed ? "+" : "-")
              << " " << t.raw_text << ".\n";
  }
}

void print_ranking_text(const Program& p, const std::string& method,
                        const std::string& formula, const std::string& note,
                        const std::vector<RankedClause>& ranking) {
  std::cout << "method: " << method;
  if (!formula.empty()) std::cout << " (" << formula << ")";
  std::cout << "\n";
  if (!note.empty()) std::cout << "note: " << note << "\n";
  for (const RankedClause& rc : ranking) {
    const Clause& c = p.clauses[rc.clause_id];
    std::cout << "  " << rc.rank << ". clause " << rc.clause_id << " (line "
              << c.span.line_begin << ")  score ";
    if (std::isinf(rc.score))
      std::cout << (rc.score > 0 ? "inf" : "-inf");
    else
      std::cout << rc.score;
    std::cout << "  " << pretty_clause(c) << "\n";
  }
}

std::string ranking_json_generic(const std::string& method,
                                 const std::string& formula,
                                 const std::string& note,
                                 const std::vector<RankedClause>& ranking) {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["formula"] = formula.empty() ? nlohmann::ordered_json(nullptr)
                                 : nlohmann::ordered_json(formula);
  j["note"] = note.empty() ? nlohmann::ordered_json(nullptr)
                           : nlohmann::ordered_json(note);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const RankedClause& rc : ranking) {
    nlohmann::ordered_json score;
    if (std::isinf(rc.score))
      score = rc.score > 0 ? "inf" : "-inf";
    else
      score = rc.score;
    arr.push_back(
        {{"clause", rc.clause_id}, {"score", score}, {"rank", rc.rank}});
  }
  j["ranking"] = arr;
  return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault localization, repair and reporting for Prolog programs"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  long long steps = 0;
  long long timeout_ms = 0;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  bool json = false;
  app.add_option("--config", config_path, "configuration file");
  auto* steps_opt =
      app.add_option("--steps", steps, "engine resolution step limit");
  auto* timeout_opt =
      app.add_option("--timeout-ms", timeout_ms, "per-test wall clock limit");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* jobs_opt = app.add_option("--jobs", jobs, "worker threads (0 = auto)");
  app.add_flag("--json", json, "JSON output");

  // test
  auto* test_cmd = app.add_subcommand("test", "run a test suite");
  std::string arg_program, arg_suite;
  test_cmd->add_option("program", arg_program, "program file")->required();
  test_cmd->add_option("suite", arg_suite, "suite file")->required();

  // localize
  auto* loc_cmd = app.add_subcommand("localize", "rank suspicious clauses");
  std::string loc_program, loc_suite, loc_method, loc_formula;
  std::string loc_desc, loc_ref;
  int loc_budget = 0;
  loc_cmd->add_option("program", loc_program)->required();
  loc_cmd->add_option("suite", loc_suite)->required();
  loc_cmd->add_option("--method", loc_method, "sbfl | mbfl | llm");
  loc_cmd->add_option("--formula", loc_formula, "suspiciousness formula");
  auto* loc_budget_opt =
      loc_cmd->add_option("--budget", loc_budget, "mutants per clause");
  loc_cmd->add_option("--desc", loc_desc, "problem description file");
  loc_cmd->add_option("--ref", loc_ref, "reference implementation file");

  // repair
  auto* rep_cmd = app.add_subcommand("repair", "search for a patch");
  std::string rep_program, rep_suite, rep_fl, rep_desc, rep_ref;
  int rep_max_k = 0, rep_top_n = 0, rep_budget = 0, rep_extra = -1;
  long long rep_time = 0;
  rep_cmd->add_option("program", rep_program)->required();
  rep_cmd->add_option("suite", rep_suite)->required();
  rep_cmd->add_option("--fl", rep_fl, "sbfl | mbfl | llm | perfect:ids");
  auto* rep_k_opt = rep_cmd->add_option("--max-k", rep_max_k);
  auto* rep_n_opt = rep_cmd->add_option("--top-n", rep_top_n);
  auto* rep_b_opt = rep_cmd->add_option("--budget", rep_budget);
  auto* rep_e_opt = rep_cmd->add_option("--extra-roots", rep_extra);
  auto* rep_t_opt = rep_cmd->add_option("--time-budget-ms", rep_time);
  rep_cmd->add_option("--desc", rep_desc);
  rep_cmd->add_option("--ref", rep_ref);

  // inject
  auto* inj_cmd = app.add_subcommand("inject", "generate buggy variants");
  std::string inj_program, inj_suite, inj_out = ".";
  int inj_bugs = 1, inj_count = 1;
  inj_cmd->add_option("program", inj_program)->required();
  inj_cmd->add_option("suite", inj_suite)->required();
  inj_cmd->add_option("--bugs", inj_bugs, "edits per instance");
  inj_cmd->add_option("--count", inj_count, "number of instances");
  inj_cmd->add_option("--out", inj_out, "output directory");

  // score
  auto* score_cmd =
      app.add_subcommand("score", "localization quality over a corpus");
  std::string score_manifest, score_method, score_formula, score_ks;
  bool score_alo = false;
  score_cmd->add_option("manifest", score_manifest, "manifest.jsonl")
      ->required();
  score_cmd->add_option("--method", score_method, "sbfl | mbfl | llm");
  score_cmd->add_option("--formula", score_formula);
  score_cmd->add_option("--ks", score_ks, "comma list, default 1,3,5,10");
  score_cmd->add_flag("--at-least-one", score_alo,
                      "0/1 acc@k instead of the fraction of faults");

  // report
  auto* report_cmd = app.add_subcommand("report", "full pipeline report");
  std::string report_program, report_suite, report_format, report_sections;
  std::string report_desc, report_ref;
  bool report_zero = false;
  report_cmd->add_option("program", report_program)->required();
  report_cmd->add_option("suite", report_suite)->required();
  report_cmd->add_option("--format", report_format, "text | json");
  report_cmd->add_option("--sections", report_sections,
                         "comma list of report sections");
  report_cmd->add_flag("--zero-timing", report_zero,
                       "render all timing fields as 0");
  report_cmd->add_option("--desc", report_desc);
  report_cmd->add_option("--ref", report_ref);

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (steps_opt->count()) cfg.limits.max_steps = steps;
    if (timeout_opt->count()) cfg.limits.wall_clock_ms = timeout_ms;
    if (seed_opt->count()) cfg.seed = seed;
    if (jobs_opt->count()) cfg.jobs = jobs;
    if (json) cfg.report_format = "json";

    if (test_cmd->parsed()) {
      Program p = load_program(arg_program);
      std::vector<TestCase> suite = load_suite(arg_suite);
      RunSuiteOptions ro;
      ro.limits = cfg.limits;
      ro.unknown_as_fail = cfg.unknown_as_fail;
      ro.jobs = cfg.jobs;
      SuiteResult r = run_suite(p, suite, ro);
      if (json)
        std::cout << suite_result_json(suite, r);
      else
        print_suite_text(suite, r);
      return r.passed == static_cast<int>(suite.size()) ? 0 : 1;
    }

    if (loc_cmd->parsed()) {
      Program p = load_program(loc_program);
      std::vector<TestCase> suite = load_suite(loc_suite);
      std::string method = loc_method.empty() ? cfg.fl_method : loc_method;
      if (!loc_formula.empty()) {
        if (method == "mbfl") {
          if (loc_formula != "metallaxis" && loc_formula != "muse")
            throw std::invalid_argument(
                "mbfl formula must be metallaxis or muse");
          cfg.mbfl_formula = loc_formula;
        } else {
          cfg.sbfl_formula = formula_from_name(loc_formula);
        }
      }
      if (loc_budget_opt->count()) cfg.mbfl_budget = loc_budget;
      if (!loc_desc.empty()) cfg.llm_description_path = loc_desc;
      if (!loc_ref.empty()) cfg.llm_reference_path = loc_ref;
      RunSuiteOptions ro;
      ro.limits = cfg.limits;
      ro.trace = true;
      ro.unknown_as_fail = cfg.unknown_as_fail;
      ro.jobs = cfg.jobs;
      SuiteResult base = run_suite(p, suite, ro);
      std::string formula, note;
      std::vector<RankedClause> ranking =
          fl_ranking(p, suite, base, cfg, method, formula, note);
      if (json) {
        if (method == "sbfl") {
          SpectrumOptions so;
          so.errors_as_failing = cfg.errors_as_failing;
          Spectrum sp = collect_spectrum(base, p, so);
          std::cout << ranking_json(ranking, sp, cfg.sbfl_formula, p);
        } else {
          std::cout << ranking_json_generic(method, formula, note, ranking);
        }
      } else {
        print_ranking_text(p, method, formula, note, ranking);
      }
      return 0;
    }

    if (rep_cmd->parsed()) {
      Program p = load_program(rep_program);
      std::vector<TestCase> suite = load_suite(rep_suite);
      if (rep_k_opt->count()) cfg.repair.max_k = rep_max_k;
      if (rep_n_opt->count()) cfg.repair.top_n_clauses = rep_top_n;
      if (rep_b_opt->count()) cfg.repair.mutant_budget = rep_budget;
      if (rep_e_opt->count()) cfg.repair.extra_body_roots = rep_extra;
      if (rep_t_opt->count()) cfg.repair.time_budget_ms = rep_time;
      if (!rep_desc.empty()) cfg.llm_description_path = rep_desc;
      if (!rep_ref.empty()) cfg.llm_reference_path = rep_ref;
      RunSuiteOptions ro;
      ro.limits = cfg.limits;
      ro.trace = true;
      ro.unknown_as_fail = cfg.unknown_as_fail;
      ro.jobs = cfg.jobs;
      SuiteResult base = run_suite(p, suite, ro);
      std::string method = rep_fl.empty() ? cfg.fl_method : rep_fl;
      std::vector<RankedClause> ranking;
      if (method.rfind("perfect:", 0) == 0) {
        ranking = perfect_ranking(p, method.substr(8));
      } else {
        std::string formula, note;
        ranking = fl_ranking(p, suite, base, cfg, method, formula, note);
        if (!note.empty()) std::cerr << "note: " << note << "\n";
      }
      RepairConfig rc = cfg.repair;
      rc.limits = cfg.limits;
      rc.unknown_as_fail = cfg.unknown_as_fail;
      rc.jobs = cfg.jobs;
      RepairResult res = repair(p, suite, ranking, rc);
      if (json) {
        std::cout << repair_json(res);
      } else {
        std::cout << "status: " << repair_status_name(res.status) << "\n";
        if (res.patch) {
          std::cout << "clause " << res.patch->clause_id << ":\n";
          std::cout << "  was: " << res.patch->original_text << "\n";
          std::cout << "  now: " << res.patch->repaired_text << "\n";
          if (res.hint) std::cout << "hint: " << *res.hint << "\n";
          std::cout << "tests fixed:";
          for (int id : res.flipped_to_pass) std::cout << " " << id;
          std::cout << "\n";
        }
        std::cout << "candidates tested: " << res.candidates_tested << "\n";
      }
      return res.status == RepairStatus::Repaired ? 0 : 1;
    }

    if (inj_cmd->parsed()) {
      Program p = load_program(inj_program);
      std::string suite_text = read_file(inj_suite);
      std::vector<TestCase> suite = parse_suite(suite_text);
      if (inj_count < 1) throw std::invalid_argument("--count must be >= 1");
      fs::create_directories(inj_out);
      std::string stem = fs::path(inj_program).stem().string();
      std::string fixed_name = stem + "_fixed.pl";
      std::string suite_name = stem + ".tests";
      write_file((fs::path(inj_out) / fixed_name).string(),
                 pretty_program(p));
      write_file((fs::path(inj_out) / suite_name).string(), suite_text);
      InjectOptions io;
      io.limits = cfg.limits;
      io.unknown_as_fail = cfg.unknown_as_fail;
      io.jobs = cfg.jobs;
      std::string manifest;
      for (int i = 0; i < inj_count; ++i) {
        BuggyInstance inst =
            inject_bugs(p, suite, inj_bugs, cfg.seed + i, io);
        std::string buggy_name =
            stem + "_bug" + std::to_string(i) + ".pl";
        write_file((fs::path(inj_out) / buggy_name).string(),
                   pretty_program(inst.buggy));
        manifest += manifest_line(inst, buggy_name, fixed_name, suite_name);
      }
      std::string manifest_path = (fs::path(inj_out) / "manifest.jsonl").string();
      write_file(manifest_path, manifest);
      if (json)
        std::cout << manifest;
      else
        std::cout << "wrote " << inj_count << " instances to " << inj_out
                  << " (" << manifest_path << ")\n";
      return 0;
    }

    if (score_cmd->parsed()) {
      std::string text = read_file(score_manifest);
      fs::path dir = fs::path(score_manifest).parent_path();
      std::string method = score_method.empty() ? "sbfl" : score_method;
      if (!score_formula.empty()) {
        if (method == "mbfl")
          cfg.mbfl_formula = score_formula;
        else
          cfg.sbfl_formula = formula_from_name(score_formula);
      }
      std::vector<int> ks = score_ks.empty() ? std::vector<int>{1, 3, 5, 10}
                                             : parse_id_list(score_ks);
      QualityOptions qo;
      qo.at_least_one = score_alo;
      std::vector<FLQuality> per;
      int timeouts = 0;
      std::istringstream lines(text);
      std::string line;
      while (std::getline(lines, line)) {
        if (line.empty()) continue;
        nlohmann::json m = nlohmann::json::parse(line);
        Program buggy =
            load_program((dir / m.at("buggy").get<std::string>()).string());
        std::vector<TestCase> suite =
            load_suite((dir / m.at("suite").get<std::string>()).string());
        std::set<int> truth;
        for (int id : m.at("ground_truth")) truth.insert(id);
        auto t0 = std::chrono::steady_clock::now();
        RunSuiteOptions ro;
        ro.limits = cfg.limits;
        ro.trace = true;
        ro.unknown_as_fail = cfg.unknown_as_fail;
        ro.jobs = cfg.jobs;
        SuiteResult base = run_suite(buggy, suite, ro);
        std::string formula, note;
        std::vector<RankedClause> ranking =
            fl_ranking(buggy, suite, base, cfg, method, formula, note);
        long long spent = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        if (spent > cfg.wall_budget_ms) {
          ++timeouts;
          continue;
        }
        per.push_back(fl_quality(ranking, truth, ks, qo));
      }
      std::cout << quality_report_json(per, timeouts);
      return 0;
    }

    if (report_cmd->parsed()) {
      if (!report_format.empty()) {
        if (report_format != "text" && report_format != "json")
          throw std::invalid_argument("--format must be text or json");
        cfg.report_format = report_format;
      }
      if (!report_sections.empty()) {
        cfg.report_sections.clear();
        std::stringstream ss(report_sections);
        std::string tok;
        while (std::getline(ss, tok, ','))
          if (!tok.empty()) cfg.report_sections.push_back(tok);
      }
      if (report_zero) cfg.zero_timing = true;
      if (!report_desc.empty()) cfg.llm_description_path = report_desc;
      if (!report_ref.empty()) cfg.llm_reference_path = report_ref;
      PipelineResult res = run_pipeline(report_program, report_suite, cfg);
      if (res.exit_code == 2) {
        std::cerr << "error: " << res.error << "\n";
        return 2;
      }
      std::cout << render_report(res.report, cfg);
      return res.exit_code;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
