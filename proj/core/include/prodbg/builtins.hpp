// Predicates every program gets for free: a hidden clause library that user
// definitions shadow, plus the sets of natively implemented predicates and
// control constructs, which are never shadowable.
#pragma once

#include <set>

#include "prodbg/program.hpp"

namespace prodbg {

// member/2, append/3, length/2, between/3, maplist/2..4 as ordinary clauses.
const Program& library_program();

// =/2 and friends, is/2, arithmetic comparisons, true/0, fail/0, msort/2.
const std::set<PredKey>& native_builtins();

// ,/2 ;/2 ->/2 \+/1 !/0 call/1..4, handled structurally by the engine.
const std::set<PredKey>& control_constructs();

bool is_reserved_predicate(const PredKey& k);

}  // namespace prodbg
