// Independent bounded proof search used to cross-check the engine. The
// prover here shares only the Term constructors with the library: it has its
// own substitution map, its own unification, and its own clause renaming.
// Generated programs are layered (a predicate only calls strictly lower
// layers), so both the engine and this prover terminate on every query.
#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "prodbg/program.hpp"
#include "prodbg/term.hpp"

namespace oracle {

using prodbg::Clause;
using prodbg::Program;
using prodbg::TermKind;
using prodbg::TermPtr;

using Subst = std::map<std::string, TermPtr>;

inline TermPtr walk(TermPtr t, const Subst& s) {
  while (t->kind == TermKind::Var) {
    auto it = s.find(t->text);
    if (it == s.end()) break;
    t = it->second;
  }
  return t;
}

inline bool unify_o(const TermPtr& a0, const TermPtr& b0, Subst& s) {
  TermPtr a = walk(a0, s);
  TermPtr b = walk(b0, s);
  if (a->kind == TermKind::Var) {
    if (b->kind == TermKind::Var && b->text == a->text) return true;
    s[a->text] = b;
    return true;
  }
  if (b->kind == TermKind::Var) {
    s[b->text] = a;
    return true;
  }
  if (a->kind == TermKind::Anon || b->kind == TermKind::Anon) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Atom:
      return a->text == b->text;
    case TermKind::Int:
      return a->value == b->value;
    case TermKind::Compound: {
      if (a->text != b->text || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!unify_o(a->args[i], b->args[i], s)) return false;
      return true;
    }
    default:
      return false;
  }
}

inline TermPtr rename_o(const TermPtr& t, long long stamp) {
  switch (t->kind) {
    case TermKind::Var:
      return prodbg::mk_var(t->text + "~" + std::to_string(stamp));
    case TermKind::Compound: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(rename_o(a, stamp));
      return prodbg::mk_compound(t->text, std::move(args));
    }
    default:
      return t;
  }
}

struct ProveState {
  const Program* p = nullptr;
  long long counter = 0;
  long long nodes = 0;
};

// True iff the goal list has a proof. Depth-first over clauses in source
// order, substitution copied per branch so no undo logic is needed.
inline bool prove_o(ProveState& st, std::vector<TermPtr> goals, Subst s,
                    int depth) {
  if (depth > 256 || ++st.nodes > 2000000)
    throw std::runtime_error("oracle search budget exceeded");
  if (goals.empty()) return true;
  TermPtr g = walk(goals.front(), s);
  std::vector<TermPtr> rest(goals.begin() + 1, goals.end());
  if (g->kind == TermKind::Compound && g->text == "=" && g->args.size() == 2) {
    Subst s2 = s;
    if (!unify_o(g->args[0], g->args[1], s2)) return false;
    return prove_o(st, std::move(rest), std::move(s2), depth + 1);
  }
  if (g->kind != TermKind::Atom && g->kind != TermKind::Compound) return false;
  size_t arity = g->kind == TermKind::Compound ? g->args.size() : 0;
  for (const Clause& c : st.p->clauses) {
    if (c.head->text != g->text) continue;
    size_t ca = c.head->kind == TermKind::Compound ? c.head->args.size() : 0;
    if (ca != arity) continue;
    long long stamp = ++st.counter;
    Subst s2 = s;
    bool ok = true;
    for (size_t i = 0; i < arity; ++i) {
      if (!unify_o(g->args[i], rename_o(c.head->args[i], stamp), s2)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    std::vector<TermPtr> next;
    next.reserve(c.body.size() + rest.size());
    for (const auto& b : c.body) next.push_back(rename_o(b, stamp));
    for (const auto& r : rest) next.push_back(r);
    if (prove_o(st, std::move(next), std::move(s2), depth + 1)) return true;
  }
  return false;
}

inline bool oracle_prove(const Program& p, const std::vector<TermPtr>& goals) {
  ProveState st;
  st.p = &p;
  return prove_o(st, goals, {}, 0);
}

// A random layered program plus queries against it. Layer 0 predicates hold
// ground facts; higher layers call strictly lower ones, so SLD terminates.
struct EngineCase {
  std::string program_text;
  std::vector<std::string> query_texts;
};

inline EngineCase gen_engine_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  auto draw = [&](int n) { return static_cast<int>(rng() % n); };
  const char* consts[] = {"a", "b", "c", "1", "2"};

  struct Pred {
    std::string name;
    int arity;
    int layer;
  };
  std::vector<Pred> preds;
  int n0 = 2 + draw(2);
  for (int i = 0; i < n0; ++i)
    preds.push_back({"f" + std::to_string(i), 1 + draw(2), 0});
  int n1 = 1 + draw(2);
  for (int i = 0; i < n1; ++i)
    preds.push_back({"g" + std::to_string(i), 1 + draw(2), 1});
  preds.push_back({"top", 1, 2});

  std::string text;
  const char* vars[] = {"X", "Y", "Z"};
  for (const Pred& pr : preds) {
    int n_clauses = 1 + draw(3);
    for (int ci = 0; ci < n_clauses; ++ci) {
      if (pr.layer == 0) {
        text += pr.name + "(";
        for (int a = 0; a < pr.arity; ++a) {
          if (a) text += ", ";
          text += consts[draw(5)];
        }
        text += ").\n";
        continue;
      }
      std::string head = pr.name + "(";
      int head_vars = pr.arity;
      for (int a = 0; a < pr.arity; ++a) {
        if (a) head += ", ";
        head += vars[a];
      }
      head += ")";
      int n_goals = 1 + draw(2);
      std::string body;
      for (int gi = 0; gi < n_goals; ++gi) {
        if (gi) body += ", ";
        if (draw(4) == 0) {
          // Var = constant keeps the oracle's equality handling honest and
          // can never build a cyclic term.
          body += std::string(vars[draw(head_vars)]) + " = " +
                  consts[draw(5)];
          continue;
        }
        std::vector<int> lower;
        for (size_t k = 0; k < preds.size(); ++k)
          if (preds[k].layer < pr.layer) lower.push_back(static_cast<int>(k));
        const Pred& callee = preds[lower[draw(static_cast<int>(lower.size()))]];
        body += callee.name + "(";
        for (int a = 0; a < callee.arity; ++a) {
          if (a) body += ", ";
          int pick = draw(3);
          if (pick == 0)
            body += consts[draw(5)];
          else
            body += vars[draw(head_vars)];
        }
        body += ")";
      }
      text += head + " :- " + body + ".\n";
    }
  }

  EngineCase ec;
  ec.program_text = text;
  int n_queries = 3;
  for (int q = 0; q < n_queries; ++q) {
    const Pred& pr = preds[draw(static_cast<int>(preds.size()))];
    std::string qt = pr.name + "(";
    for (int a = 0; a < pr.arity; ++a) {
      if (a) qt += ", ";
      qt += draw(2) == 0 ? std::string(consts[draw(5)])
                         : std::string("Q") + std::to_string(a);
    }
    qt += ").";
    ec.query_texts.push_back(qt);
  }
  return ec;
}

}  // namespace oracle
