#include "prodbg/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prodbg {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(int line, const std::string& what) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " +
                              what);
}

long long to_int(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    bad(line, "expected an integer for " + key);
  }
}

std::uint64_t to_uint(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    std::uint64_t x = std::stoull(v, &used);
    if (used != v.size() || v[0] == '-') throw std::invalid_argument("");
    return x;
  } catch (...) {
    bad(line, "expected a non-negative integer for " + key);
  }
}

double to_real(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    bad(line, "expected a number for " + key);
  }
}

bool to_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad(line, "expected true or false for " + key);
}

std::string to_string_val(const std::string& v, int line,
                          const std::string& key) {
  if (v.empty() || v[0] != '"') return v;
  if (v.size() < 2 || v.back() != '"') bad(line, "unterminated string for " + key);
  std::string out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] == '\\' && i + 2 < v.size()) {
      ++i;
      out.push_back(v[i] == 'n' ? '\n' : v[i] == 't' ? '\t' : v[i]);
    } else {
      out.push_back(v[i]);
    }
  }
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      std::string t = trim(cur);
      if (!t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  std::string t = trim(cur);
  if (!t.empty()) out.push_back(t);
  return out;
}

std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') bad(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "engine" && section != "sbfl" && section != "mbfl" &&
          section != "repair" && section != "llm" && section != "pipeline" &&
          section != "report")
        bad(line, "unknown section [" + section + "]");
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) bad(line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) bad(line, "empty key");
    if (val.empty()) bad(line, "empty value for " + key);
    std::string full = section.empty() ? key : section + "." + key;

    if (full == "seed") {
      cfg.seed = to_uint(val, line, full);
    } else if (full == "jobs") {
      cfg.jobs = static_cast<unsigned>(to_int(val, line, full));
    } else if (full == "engine.max_steps") {
      cfg.limits.max_steps = to_int(val, line, full);
    } else if (full == "engine.max_depth") {
      cfg.limits.max_depth = static_cast<int>(to_int(val, line, full));
    } else if (full == "engine.timeout_ms") {
      cfg.limits.wall_clock_ms = to_int(val, line, full);
    } else if (full == "engine.unknown_as_fail") {
      cfg.unknown_as_fail = to_bool(val, line, full);
    } else if (full == "sbfl.formula") {
      try {
        cfg.sbfl_formula = formula_from_name(to_string_val(val, line, full));
      } catch (const std::exception& e) {
        bad(line, e.what());
      }
    } else if (full == "sbfl.errors_as_failing") {
      cfg.errors_as_failing = to_bool(val, line, full);
    } else if (full == "mbfl.formula") {
      std::string f = to_string_val(val, line, full);
      if (f != "metallaxis" && f != "muse")
        bad(line, "mbfl.formula must be metallaxis or muse");
      cfg.mbfl_formula = f;
    } else if (full == "mbfl.budget") {
      cfg.mbfl_budget = static_cast<int>(to_int(val, line, full));
    } else if (full == "repair.max_k") {
      cfg.repair.max_k = static_cast<int>(to_int(val, line, full));
    } else if (full == "repair.top_n") {
      cfg.repair.top_n_clauses = static_cast<int>(to_int(val, line, full));
    } else if (full == "repair.budget") {
      cfg.repair.mutant_budget = static_cast<int>(to_int(val, line, full));
    } else if (full == "repair.extra_body_roots") {
      cfg.repair.extra_body_roots = static_cast<int>(to_int(val, line, full));
    } else if (full == "repair.time_budget_ms") {
      cfg.repair.time_budget_ms = to_int(val, line, full);
    } else if (full == "llm.base_url") {
      cfg.llm.base_url = to_string_val(val, line, full);
    } else if (full == "llm.model") {
      cfg.llm.model = to_string_val(val, line, full);
    } else if (full == "llm.n") {
      cfg.llm.n_completions = static_cast<int>(to_int(val, line, full));
    } else if (full == "llm.temperature") {
      cfg.llm.temperature = to_real(val, line, full);
    } else if (full == "llm.timeout_ms") {
      cfg.llm.timeout_ms = static_cast<int>(to_int(val, line, full));
    } else if (full == "llm.api_key_env") {
      cfg.llm.api_key_env = to_string_val(val, line, full);
    } else if (full == "llm.description_path") {
      cfg.llm_description_path = to_string_val(val, line, full);
    } else if (full == "llm.reference_path") {
      cfg.llm_reference_path = to_string_val(val, line, full);
    } else if (full == "pipeline.fl_method") {
      std::string m = to_string_val(val, line, full);
      if (m != "sbfl" && m != "mbfl" && m != "llm")
        bad(line, "pipeline.fl_method must be sbfl, mbfl or llm");
      cfg.fl_method = m;
    } else if (full == "pipeline.wall_budget_ms") {
      cfg.wall_budget_ms = to_int(val, line, full);
    } else if (full == "report.format") {
      std::string f = to_string_val(val, line, full);
      if (f != "text" && f != "json")
        bad(line, "report.format must be text or json");
      cfg.report_format = f;
    } else if (full == "report.sections") {
      cfg.report_sections = split_list(to_string_val(val, line, full));
    } else if (full == "report.zero_timing") {
      cfg.zero_timing = to_bool(val, line, full);
    } else {
      bad(line, "unknown key " + full);
    }
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_string(const Config& cfg) {
  std::ostringstream o;
  o << "seed = " << cfg.seed << "\n";
  o << "jobs = " << cfg.jobs << "\n";
  o << "\n[engine]\n";
  o << "max_steps = " << cfg.limits.max_steps << "\n";
  o << "max_depth = " << cfg.limits.max_depth << "\n";
  o << "timeout_ms = " << cfg.limits.wall_clock_ms << "\n";
  o << "unknown_as_fail = " << (cfg.unknown_as_fail ? "true" : "false") << "\n";
  o << "\n[sbfl]\n";
  o << "formula = " << quote(formula_name(cfg.sbfl_formula)) << "\n";
  o << "errors_as_failing = " << (cfg.errors_as_failing ? "true" : "false")
    << "\n";
  o << "\n[mbfl]\n";
  o << "formula = " << quote(cfg.mbfl_formula) << "\n";
  o << "budget = " << cfg.mbfl_budget << "\n";
  o << "\n[repair]\n";
  o << "max_k = " << cfg.repair.max_k << "\n";
  o << "top_n = " << cfg.repair.top_n_clauses << "\n";
  o << "budget = " << cfg.repair.mutant_budget << "\n";
  o << "extra_body_roots = " << cfg.repair.extra_body_roots << "\n";
  o << "time_budget_ms = " << cfg.repair.time_budget_ms << "\n";
  o << "\n[llm]\n";
  o << "base_url = " << quote(cfg.llm.base_url) << "\n";
  o << "model = " << quote(cfg.llm.model) << "\n";
  o << "n = " << cfg.llm.n_completions << "\n";
  o << "temperature = " << cfg.llm.temperature << "\n";
  o << "timeout_ms = " << cfg.llm.timeout_ms << "\n";
  o << "api_key_env = " << quote(cfg.llm.api_key_env) << "\n";
  o << "description_path = " << quote(cfg.llm_description_path) << "\n";
  o << "reference_path = " << quote(cfg.llm_reference_path) << "\n";
  o << "\n[pipeline]\n";
  o << "fl_method = " << quote(cfg.fl_method) << "\n";
  o << "wall_budget_ms = " << cfg.wall_budget_ms << "\n";
  o << "\n[report]\n";
  o << "format = " << quote(cfg.report_format) << "\n";
  std::string sections;
  for (std::size_t i = 0; i < cfg.report_sections.size(); ++i) {
    if (i) sections += ", ";
    sections += cfg.report_sections[i];
  }
  o << "sections = " << quote(sections) << "\n";
  o << "zero_timing = " << (cfg.zero_timing ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace prodbg
