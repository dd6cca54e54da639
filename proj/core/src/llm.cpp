#include "prodbg/llm.hpp"

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "httplib.h"
#include <nlohmann/json.hpp>
#include "prodbg/parser.hpp"
#include "prodbg/pretty.hpp"
#include "prodbg/textdiff.hpp"

namespace prodbg {

namespace {

const char kFlSystem[] =
    "Your task is to find faulty clauses in a Prolog program.\n"
    "\n"
    "You should return a list of clauses in the program that are buggy.\n"
    "\n"
    "Your final answer should only include exact copies of the clauses in "
    "the program which you think contain bugs and nothing else.";

const char kRepairSystem[] =
    "Your task is to repair faulty clauses in a Prolog program.\n"
    "\n"
    "You should return a minimal diff of the program, such that the buggy "
    "program is correct after applying the diff.\n"
    "\n"
    "You will be given a description of the problem, a correct reference "
    "implementation, a buggy implementation and a list of faulty clauses "
    "that should be corrected.\n"
    "\n"
    "Your final answer should include the diff and nothing else.";

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string slot(const Program& p) { return trim(pretty_program(p)); }

void check_inputs(const char* who, const std::string& description,
                  const Program& reference, const Program& student) {
  if (trim(description).empty())
    throw std::invalid_argument(std::string(who) + ": empty description");
  if (reference.clauses.empty())
    throw std::invalid_argument(std::string(who) + ": empty reference program");
  if (student.clauses.empty())
    throw std::invalid_argument(std::string(who) + ": empty student program");
}

std::string normalize_ws(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool diff_body_line(const std::string& l) {
  if (l.empty()) return true;  // blank context inside a hunk
  char c = l[0];
  return c == ' ' || c == '+' || c == '-' || c == '\\' ||
         l.rfind("@@", 0) == 0;
}

// Pulls the first plausible unified-diff block out of free-form model output,
// looking inside code fences first.
std::string extract_diff(const std::string& text) {
  std::vector<std::string> ls = lines_of(text);
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t fence = std::string::npos;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (ls[i].rfind("```", 0) == 0) {
      if (fence == std::string::npos) {
        fence = i + 1;
      } else {
        spans.emplace_back(fence, i);
        fence = std::string::npos;
      }
    }
  }
  if (fence != std::string::npos) spans.emplace_back(fence, ls.size());
  if (spans.empty()) spans.emplace_back(0, ls.size());
  for (auto [b, e] : spans) {
    std::size_t at = std::string::npos;
    for (std::size_t i = b; i < e; ++i) {
      if (ls[i].rfind("--- ", 0) == 0 || ls[i].rfind("@@", 0) == 0) {
        at = i;
        break;
      }
    }
    if (at == std::string::npos) continue;
    std::string block;
    bool seen_hunk = false;
    for (std::size_t i = at; i < e; ++i) {
      const std::string& l = ls[i];
      bool header = l.rfind("--- ", 0) == 0 || l.rfind("+++ ", 0) == 0;
      if (!header && !diff_body_line(l)) break;
      if (l.rfind("@@", 0) == 0) seen_hunk = true;
      if (!header && !seen_hunk) break;
      block += l.empty() ? std::string(" ") : l;
      block += '\n';
    }
    if (seen_hunk) return block;
  }
  return "";
}

}  // namespace

PromptBundle build_fl_prompt(const std::string& description,
                             const Program& reference,
                             const Program& student) {
  check_inputs("build_fl_prompt", description, reference, student);
  PromptBundle b;
  b.system = kFlSystem;
  b.user =
      "Here is the program description for this program:\n\n" +
      trim(description) +
      "\n\nHere is the reference implementation for this program:\n\n" +
      slot(reference) +
      "\n\nAnd here is the program where you need to identify the faulty "
      "clauses:\n\n" +
      slot(student);
  return b;
}

PromptBundle build_repair_prompt(const std::string& description,
                                 const Program& reference,
                                 const Program& student,
                                 const std::vector<Clause>& faulty) {
  check_inputs("build_repair_prompt", description, reference, student);
  std::string flist;
  if (faulty.empty()) {
    flist = "(none identified)";
  } else {
    for (std::size_t i = 0; i < faulty.size(); ++i) {
      if (i) flist += '\n';
      flist += pretty_clause(faulty[i]);
    }
  }
  PromptBundle b;
  b.system = kRepairSystem;
  b.user =
      "Here is the program description for this program:\n\n" +
      trim(description) +
      "\n\nHere is the reference implementation for this program:\n\n" +
      slot(reference) + "\n\nAnd here is the program you need to correct:\n\n" +
      slot(student) +
      "\n\nAnd these are the faulty clauses in the program:\n\n" + flist;
  return b;
}

std::vector<std::string> query_model(const EndpointConfig& cfg,
                                     const PromptBundle& bundle) {
  if (cfg.n_completions < 1)
    throw std::invalid_argument("query_model: n_completions must be >= 1");
  std::string target = cfg.base_url;
  while (!target.empty() && target.back() == '/') target.pop_back();
  std::string host = target, path = "/chat/completions";
  std::size_t scheme = target.find("://");
  std::size_t slash =
      target.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (slash != std::string::npos) {
    host = target.substr(0, slash);
    path = target.substr(slash) + path;
  }

  nlohmann::json body;
  body["model"] = cfg.model;
  body["messages"] = {{{"role", "system"}, {"content", bundle.system}},
                      {{"role", "user"}, {"content", bundle.user}}};
  body["n"] = cfg.n_completions;
  body["temperature"] = cfg.temperature;
  std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv(cfg.api_key_env.c_str()))
    if (*key) headers.emplace("Authorization", std::string("Bearer ") + key);

  std::string last_error;
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (attempt)
      std::this_thread::sleep_for(std::chrono::milliseconds(200 * attempt));
    httplib::Client client(host);
    client.set_connection_timeout(0, cfg.timeout_ms * 1000LL);
    client.set_read_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw std::runtime_error("query_model: endpoint returned status " +
                               std::to_string(res->status) + ": " + res->body);
    try {
      nlohmann::json j = nlohmann::json::parse(res->body);
      std::vector<std::string> out;
      for (const auto& choice : j.at("choices"))
        out.push_back(choice.at("message").at("content").get<std::string>());
      if (out.empty())
        throw std::runtime_error("query_model: response carried no choices");
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(std::string("query_model: malformed response: ") +
                               e.what());
    }
  }
  throw std::runtime_error("query_model: request failed after 3 attempts (" +
                           last_error + ")");
}

std::vector<RankedClause> parse_fl_response(const std::string& text,
                                            const Program& program) {
  std::vector<std::pair<std::string, int>> norm;  // normalized text, clause id
  for (const Clause& c : program.clauses)
    norm.emplace_back(normalize_ws(pretty_clause(c)), c.id);

  std::vector<int> order;
  std::vector<char> used(program.clauses.size(), 0);
  for (const std::string& raw : lines_of(text)) {
    std::string line = normalize_ws(raw);
    if (line.empty()) continue;
    for (const auto& [t, id] : norm) {
      if (t == line && !used[id]) {
        used[id] = 1;
        order.push_back(id);
        break;
      }
    }
  }
  for (int id = static_cast<int>(program.clauses.size()) - 1; id >= 0; --id)
    if (!used[id]) order.push_back(id);

  std::vector<RankedClause> out;
  int n = static_cast<int>(order.size());
  for (int i = 0; i < n; ++i)
    out.push_back({order[i], static_cast<double>(n - i), i + 1});
  return out;
}

std::optional<Program> parse_repair_diff(const std::string& text,
                                         const Program& program) {
  std::string diff = extract_diff(text);
  if (diff.empty()) return std::nullopt;
  std::optional<std::string> applied =
      apply_unified_diff(pretty_program(program), diff);
  if (!applied) return std::nullopt;
  try {
    Program result = parse_program(*applied);
    if (result.clauses.empty()) return std::nullopt;
    return result;
  } catch (...) {
    return std::nullopt;
  }
}

}  // namespace prodbg
