// Prompt construction, a chat-completions client, and response parsing for
// model-assisted localization and repair. Everything else in the pipeline
// works with this module unused; callers treat failures as "unavailable".
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prodbg/program.hpp"
#include "prodbg/sbfl.hpp"

namespace prodbg {

struct PromptBundle {
  std::string system;
  std::string user;
};

struct EndpointConfig {
  // Base URL up to and including the API prefix; the client posts to
  // base_url + "/chat/completions". Plain http only.
  std::string base_url = "http://localhost:8080/v1";
  std::string model = "prodebug";
  int n_completions = 1;
  double temperature = 0.0;
  int timeout_ms = 30000;
  std::string api_key_env = "PRODBG_LLM_API_KEY";
};

// Fills the localization template with the description and the two programs
// pretty-printed. Throws std::invalid_argument when the description is empty
// or either program has no clauses.
PromptBundle build_fl_prompt(const std::string& description,
                             const Program& reference, const Program& student);

// Repair variant; the faulty clauses render one per line, an empty list as
// "(none identified)".
PromptBundle build_repair_prompt(const std::string& description,
                                 const Program& reference,
                                 const Program& student,
                                 const std::vector<Clause>& faulty);

// POSTs {model, messages, n, temperature} and returns the completion texts
// in response order. The API key is read from the environment variable named
// by the config and sent as a bearer token when present. Transient failures
// are retried a bounded number of times; std::runtime_error afterwards.
std::vector<std::string> query_model(const EndpointConfig& cfg,
                                     const PromptBundle& bundle);

// Matches response lines to clauses by whitespace-normalized pretty-print
// equality: matched clauses rank in response order (first mention wins),
// unmatched lines are dropped, and the remaining clauses follow in reverse
// source order. Always a full permutation, even for garbage input.
std::vector<RankedClause> parse_fl_response(const std::string& text,
                                            const Program& program);

// Extracts a unified diff from the response, applies it to the pretty-printed
// program, and re-parses. Any failure yields nullopt.
std::optional<Program> parse_repair_diff(const std::string& text,
                                         const Program& program);

}  // namespace prodbg
