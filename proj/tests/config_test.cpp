#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "prodbg/config.hpp"
#include "test_util.hpp"

using namespace prodbg;

namespace {

std::string error_text(const std::string& doc) {
  try {
    parse_config(doc);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("default configuration matches runtime defaults") {
  Config cfg;
  CHECK(cfg.seed == 0);
  CHECK(cfg.jobs == 0);
  CHECK(cfg.limits.max_steps == 100000);
  CHECK(cfg.limits.max_depth == 5000);
  CHECK(cfg.limits.wall_clock_ms == 2000);
  CHECK(cfg.unknown_as_fail == false);
  CHECK(cfg.sbfl_formula == Formula::Ochiai);
  CHECK(cfg.errors_as_failing == false);
  CHECK(cfg.mbfl_formula == "metallaxis");
  CHECK(cfg.mbfl_budget == 500);
  CHECK(cfg.llm.base_url == "http://localhost:8080/v1");
  CHECK(cfg.llm.n_completions == 1);
  CHECK(cfg.fl_method == "sbfl");
  CHECK(cfg.wall_budget_ms == 600000);
  CHECK(cfg.report_format == "text");
  CHECK(cfg.report_sections ==
        std::vector<std::string>{"tests", "fl", "repair_hint", "metrics"});
  CHECK(cfg.zero_timing == false);
}

TEST_CASE("config_to_string round-trips through parse_config") {
  SUBCASE("defaults") {
    Config cfg;
    std::string doc = config_to_string(cfg);
    Config back = parse_config(doc);
    CHECK(config_to_string(back) == doc);
  }

  SUBCASE("every field changed") {
    Config cfg;
    cfg.seed = 42;
    cfg.jobs = 4;
    cfg.limits.max_steps = 777;
    cfg.limits.max_depth = 99;
    cfg.limits.wall_clock_ms = 1234;
    cfg.unknown_as_fail = true;
    cfg.sbfl_formula = Formula::DStar;
    cfg.errors_as_failing = true;
    cfg.mbfl_formula = "muse";
    cfg.mbfl_budget = 17;
    cfg.repair.max_k = 3;
    cfg.repair.top_n_clauses = 7;
    cfg.repair.mutant_budget = 111;
    cfg.repair.extra_body_roots = 2;
    cfg.repair.time_budget_ms = 5000;
    cfg.llm.base_url = "http://example.test:9999/api/v2";
    cfg.llm.model = "tiny";
    cfg.llm.n_completions = 5;
    cfg.llm.temperature = 0.5;
    cfg.llm.timeout_ms = 250;
    cfg.llm.api_key_env = "OTHER_KEY";
    cfg.llm_description_path = "/tmp/desc.txt";
    cfg.llm_reference_path = "/tmp/ref.pl";
    cfg.fl_method = "mbfl";
    cfg.wall_budget_ms = 123456;
    cfg.report_format = "json";
    cfg.report_sections = {"tests", "metrics"};
    cfg.zero_timing = true;

    std::string doc = config_to_string(cfg);
    Config back = parse_config(doc);
    CHECK(config_to_string(back) == doc);
    CHECK(back.seed == 42);
    CHECK(back.limits.max_steps == 777);
    CHECK(back.sbfl_formula == Formula::DStar);
    CHECK(back.mbfl_formula == "muse");
    CHECK(back.repair.time_budget_ms == 5000);
    CHECK(back.llm.temperature == doctest::Approx(0.5));
    CHECK(back.llm_description_path == "/tmp/desc.txt");
    CHECK(back.fl_method == "mbfl");
    CHECK(back.report_format == "json");
    CHECK(back.report_sections == std::vector<std::string>{"tests", "metrics"});
    CHECK(back.zero_timing == true);
  }
}

TEST_CASE("parse_config applies keys per section") {
  std::string doc =
      "# top-level knobs\n"
      "seed = 9\n"
      "jobs = 2\n"
      "\n"
      "[engine]\n"
      "max_steps = 5000\n"
      "max_depth = 64   # inline comment\n"
      "timeout_ms = 100\n"
      "unknown_as_fail = true\n"
      "\n"
      "[sbfl]\n"
      "formula = \"tarantula\"\n"
      "errors_as_failing = true\n"
      "\n"
      "[mbfl]\n"
      "formula = muse\n"
      "budget = 10\n"
      "\n"
      "[repair]\n"
      "max_k = 2\n"
      "top_n = 4\n"
      "budget = 99\n"
      "extra_body_roots = 0\n"
      "time_budget_ms = 777\n"
      "\n"
      "[llm]\n"
      "base_url = \"http://h/p\"\n"
      "model = m1\n"
      "n = 3\n"
      "temperature = 0.25\n"
      "timeout_ms = 50\n"
      "api_key_env = \"K\"\n"
      "description_path = \"d.txt\"\n"
      "reference_path = \"r.pl\"\n"
      "\n"
      "[pipeline]\n"
      "fl_method = llm\n"
      "wall_budget_ms = 4242\n"
      "\n"
      "[report]\n"
      "format = json\n"
      "sections = \"tests, fl , repair_full_diff\"\n"
      "zero_timing = true\n";
  Config cfg = parse_config(doc);
  CHECK(cfg.seed == 9);
  CHECK(cfg.jobs == 2);
  CHECK(cfg.limits.max_steps == 5000);
  CHECK(cfg.limits.max_depth == 64);
  CHECK(cfg.limits.wall_clock_ms == 100);
  CHECK(cfg.unknown_as_fail);
  CHECK(cfg.sbfl_formula == Formula::Tarantula);
  CHECK(cfg.errors_as_failing);
  CHECK(cfg.mbfl_formula == "muse");
  CHECK(cfg.mbfl_budget == 10);
  CHECK(cfg.repair.max_k == 2);
  CHECK(cfg.repair.top_n_clauses == 4);
  CHECK(cfg.repair.mutant_budget == 99);
  CHECK(cfg.repair.extra_body_roots == 0);
  CHECK(cfg.repair.time_budget_ms == 777);
  CHECK(cfg.llm.base_url == "http://h/p");
  CHECK(cfg.llm.model == "m1");
  CHECK(cfg.llm.n_completions == 3);
  CHECK(cfg.llm.temperature == doctest::Approx(0.25));
  CHECK(cfg.llm.timeout_ms == 50);
  CHECK(cfg.llm.api_key_env == "K");
  CHECK(cfg.llm_description_path == "d.txt");
  CHECK(cfg.llm_reference_path == "r.pl");
  CHECK(cfg.fl_method == "llm");
  CHECK(cfg.wall_budget_ms == 4242);
  CHECK(cfg.report_format == "json");
  CHECK(cfg.report_sections ==
        std::vector<std::string>{"tests", "fl", "repair_full_diff"});
  CHECK(cfg.zero_timing);
}

TEST_CASE("parse_config handles comments, blanks and quoting") {
  Config cfg = parse_config(
      "\n"
      "   # full-line comment\n"
      "seed = 5 # trailing comment\n"
      "[llm]\n"
      "model = \"has # hash and \\\"quote\\\"\"\n");
  CHECK(cfg.seed == 5);
  CHECK(cfg.llm.model == "has # hash and \"quote\"");

  CHECK(parse_config("").seed == 0);
  CHECK(parse_config("  \n\t\n# only comments\n").fl_method == "sbfl");
}

TEST_CASE("parse_config rejects bad input with the line number") {
  CHECK(error_text("bogus_key = 1").find("line 1") != std::string::npos);
  CHECK(error_text("bogus_key = 1").find("unknown key") != std::string::npos);
  CHECK(error_text("seed = 1\n[nope]\n").find("line 2") != std::string::npos);
  CHECK(error_text("seed = 1\n[nope]\n").find("unknown section") !=
        std::string::npos);
  CHECK(error_text("seed = abc").find("line 1") != std::string::npos);
  CHECK(error_text("seed = -3").find("non-negative") != std::string::npos);
  CHECK(error_text("\n\n[engine]\nunknown_as_fail = maybe\n").find("line 4") !=
        std::string::npos);
  CHECK(error_text("[engine]\nmax_steps\n").find("key = value") !=
        std::string::npos);
  CHECK(error_text("[engine\nmax_steps = 1\n").find("unterminated section") !=
        std::string::npos);
  CHECK(error_text("[llm]\nmodel = \"open\n").find("unterminated string") !=
        std::string::npos);
  CHECK(error_text("seed =").find("line 1") != std::string::npos);
  CHECK(error_text("[sbfl]\nformula = zorp\n") != "");
  CHECK(error_text("[mbfl]\nformula = zorp\n").find("metallaxis or muse") !=
        std::string::npos);
  CHECK(error_text("[pipeline]\nfl_method = magic\n")
            .find("sbfl, mbfl or llm") != std::string::npos);
  CHECK(error_text("[report]\nformat = xml\n").find("text or json") !=
        std::string::npos);
  CHECK(error_text("[engine]\nmax_depth = 1.5\n").find("integer") !=
        std::string::npos);
  CHECK(error_text("[llm]\ntemperature = warm\n").find("number") !=
        std::string::npos);
}

TEST_CASE("load_config reads files and reports I/O errors") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "prodbg_config_test.cfg";
  {
    std::ofstream out(path);
    out << "seed = 31\n[report]\nzero_timing = true\n";
  }
  Config cfg = load_config(path.string());
  CHECK(cfg.seed == 31);
  CHECK(cfg.zero_timing);
  fs::remove(path);

  CHECK_THROWS_AS(load_config((fs::temp_directory_path() /
                               "prodbg_no_such_file.cfg")
                                  .string()),
                  std::runtime_error);
}
