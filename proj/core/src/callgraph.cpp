#include "prodbg/callgraph.hpp"

#include <deque>

namespace prodbg {
namespace {

void scan_goal(const TermPtr& g, std::set<PredKey>& out) {
  switch (g->kind) {
    case TermKind::Atom:
      out.insert({g->text, 0});
      return;
    case TermKind::Tuple:
      for (const TermPtr& e : g->args) scan_goal(e, out);
      return;
    case TermKind::Compound:
      break;
    default:
      return;
  }
  const std::string& f = g->text;
  int n = static_cast<int>(g->args.size());
  if ((f == "," || f == ";" || f == "->") && n == 2) {
    scan_goal(g->args[0], out);
    scan_goal(g->args[1], out);
    return;
  }
  if (f == "\\+" && n == 1) {
    scan_goal(g->args[0], out);
    return;
  }
  if (f == "call" && n >= 1 && n <= 4) {
    const TermPtr& target = g->args[0];
    int extra = n - 1;
    if (target->kind == TermKind::Atom)
      out.insert({target->text, extra});
    else if (target->kind == TermKind::Compound)
      out.insert({target->text, static_cast<int>(target->args.size()) + extra});
    return;
  }
  if (f == "maplist" && n >= 2 && n <= 4) {
    const TermPtr& target = g->args[0];
    int extra = n - 1;
    if (target->kind == TermKind::Atom)
      out.insert({target->text, extra});
    else if (target->kind == TermKind::Compound)
      out.insert({target->text, static_cast<int>(target->args.size()) + extra});
    out.insert({f, n});
    return;
  }
  out.insert({f, n});
}

}  // namespace

CallGraph predicate_call_graph(const Program& p) {
  CallGraph g;
  for (const auto& [key, ids] : p.predicate_index) g[key];
  for (const Clause& c : p.clauses) {
    std::set<PredKey>& edges = g[clause_pred(c)];
    for (const TermPtr& goal : c.body) scan_goal(goal, edges);
  }
  return g;
}

std::set<PredKey> transitive_closure(const CallGraph& g,
                                     const std::set<PredKey>& seeds) {
  std::set<PredKey> seen = seeds;
  std::deque<PredKey> work(seeds.begin(), seeds.end());
  while (!work.empty()) {
    PredKey k = work.front();
    work.pop_front();
    auto it = g.find(k);
    if (it == g.end()) continue;
    for (const PredKey& next : it->second)
      if (seen.insert(next).second) work.push_back(next);
  }
  return seen;
}

std::set<PredKey> goal_predicates(const TermPtr& goal) {
  std::set<PredKey> out;
  scan_goal(goal, out);
  return out;
}

}  // namespace prodbg
