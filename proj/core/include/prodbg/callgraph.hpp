// Predicate-level call graph and reachability, used to scope ground-truth
// clause sets to the predicates a test suite can actually reach.
#pragma once

#include <map>
#include <set>

#include "prodbg/program.hpp"

namespace prodbg {

using CallGraph = std::map<PredKey, std::set<PredKey>>;

// Edges from each clause's head predicate to every predicate called in its
// body, looking through , ; -> \+ and into call/N and maplist/N targets.
CallGraph predicate_call_graph(const Program& p);

std::set<PredKey> transitive_closure(const CallGraph& g,
                                     const std::set<PredKey>& seeds);

// Predicates invoked by a goal term, using the same traversal as the graph.
std::set<PredKey> goal_predicates(const TermPtr& goal);

}  // namespace prodbg
