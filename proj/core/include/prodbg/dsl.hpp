// Clause-local mutation grammar: the production inventory drawn from a
// program plus a fixed builtin set, and the slot discipline that says which
// child positions of each production must, may, or must not be filled.
#pragma once

#include <string>
#include <vector>

#include "prodbg/program.hpp"
#include "prodbg/term.hpp"

namespace prodbg {

enum class ProdKind {
  Empty,
  Predicate,
  Op2,
  Op1,
  List,
  ListC,
  Tuple,
  Curly,
  Atom,
  Variable,
  Integer,
  Anonymous,
  Cut,
};

const char* prod_kind_name(ProdKind k);

struct Production {
  int id = 0;
  ProdKind kind = ProdKind::Empty;
  std::string symbol;
  long long value = 0;
  int arity = 0;
  bool user_pred = false;
};

std::string production_label(const Production& p);

struct DSL {
  std::vector<Production> productions;

  const Production& prod(int id) const { return productions.at(id); }
  int size() const { return static_cast<int>(productions.size()); }
};

// How a child slot of a node decoded as `p` behaves when the node has `cap`
// child slots. list_c keeps its tail in the last slot; optional slots decode
// to nothing when empty.
enum class SlotRule { Required, Optional, MustBeEmpty };

SlotRule slot_rule(const Production& p, int slot, int cap);

// Number of Required slots under `cap`.
int required_children(const Production& p, int cap);

// Grammar for mutating one clause of `p`: program-defined and referenced
// predicates plus a builtin set, curried variants when maplist is in play,
// binary and prefix operators, list/tuple/curly constructors, the target
// clause's variables plus `fresh_vars` new ones, atom and integer constants
// from the program, `_`, `!`, and the empty production (always id 0).
DSL build_dsl(const Program& p, int target_clause_id, int fresh_vars = 2);

// Production id whose decoding matches the root of `t`, or -1. Atoms in
// callable position prefer a matching 0-ary predicate production.
int find_production(const DSL& dsl, const TermPtr& t, bool callable_position);

}  // namespace prodbg
