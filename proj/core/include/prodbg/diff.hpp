// Structural clause diffs and hint abstraction. Paths address nodes under a
// virtual clause root: {0, ...} descends into the head, {1} is the whole body
// (only when goal counts differ), {1, i, ...} descends into body goal i.
// Child indices follow term_children order.
#pragma once

#include <vector>

#include "prodbg/program.hpp"

namespace prodbg {

using NodePath = std::vector<int>;

// Minimal differing subtrees, shallowest-first in left-to-right order.
// Variable names compare literally. Empty iff the clauses are identical.
std::vector<NodePath> clause_diff(const Clause& a, const Clause& b);

// The buggy clause with every differing subtree replaced by a hole.
// Throws std::invalid_argument when the clauses are identical.
Clause abstract_hint(const Clause& buggy, const Clause& repaired);

}  // namespace prodbg
