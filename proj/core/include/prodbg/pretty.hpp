// Canonical single-space printer. Output re-parses to a structurally
// identical tree for any parser-produced term; holes render as "?".
#pragma once

#include <string>
#include <vector>

#include "prodbg/program.hpp"
#include "prodbg/term.hpp"

namespace prodbg {

std::string pretty(const TermPtr& t);
std::string pretty_goals(const std::vector<TermPtr>& goals);
std::string pretty_clause(const Clause& c);

// Directives first, then clauses, one per line, trailing newline.
// An empty program renders as "".
std::string pretty_program(const Program& p);

}  // namespace prodbg
