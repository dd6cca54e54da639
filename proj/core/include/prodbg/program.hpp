// Clauses and programs. Clause ids are dense source-order indices; the
// predicate index maps name/arity to the ids of its clauses in source order.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "prodbg/term.hpp"

namespace prodbg {

struct PredKey {
  std::string name;
  int arity = 0;
  auto operator<=>(const PredKey&) const = default;
};

std::string pred_key_str(const PredKey& k);

struct Clause {
  int id = 0;
  TermPtr head;
  std::vector<TermPtr> body;  // empty for facts
  SourceSpan span;
};

PredKey clause_pred(const Clause& c);

struct Program {
  std::vector<Clause> clauses;
  std::vector<TermPtr> directives;
  std::map<PredKey, std::vector<int>> predicate_index;
};

// Builds the index; clause ids are (re)assigned densely in order.
Program make_program(std::vector<Clause> clauses,
                     std::vector<TermPtr> directives = {});

// Replaces one clause, keeping ids and rebuilding the index.
Program replace_clause(const Program& p, const Clause& c);

bool program_equal(const Program& a, const Program& b);

// Position of a clause within its predicate (0-based), for display.
int clause_index_in_pred(const Program& p, int clause_id);

}  // namespace prodbg
