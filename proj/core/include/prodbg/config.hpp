// Tool configuration: one flat document of key = value lines grouped into
// sections, mirroring every runtime default.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prodbg/engine.hpp"
#include "prodbg/llm.hpp"
#include "prodbg/repair.hpp"
#include "prodbg/sbfl.hpp"

namespace prodbg {

struct Config {
  std::uint64_t seed = 0;
  unsigned jobs = 0;  // 0 = hardware concurrency

  // [engine]
  ExecLimits limits;
  bool unknown_as_fail = false;

  // [sbfl]
  Formula sbfl_formula = Formula::Ochiai;
  bool errors_as_failing = false;

  // [mbfl]
  std::string mbfl_formula = "metallaxis";  // or "muse"
  int mbfl_budget = 500;

  // [repair]
  RepairConfig repair;

  // [llm]
  EndpointConfig llm;
  std::string llm_description_path;  // optional prompt inputs
  std::string llm_reference_path;

  // [pipeline]
  std::string fl_method = "sbfl";  // sbfl | mbfl | llm
  long long wall_budget_ms = 600000;

  // [report]
  std::string report_format = "text";  // text | json
  std::vector<std::string> report_sections = {"tests", "fl", "repair_hint",
                                              "metrics"};
  bool zero_timing = false;
};

// Supported syntax: `[section]` headers, `key = value`, `#` comments, blank
// lines; values are integers, reals, true/false, or strings (quoted or
// bare). Unknown keys, unknown sections and malformed values all throw
// std::invalid_argument with the line number.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);  // I/O errors as runtime_error

// Renders the full document with every key present; parses back to the same
// configuration.
std::string config_to_string(const Config& cfg);

}  // namespace prodbg
