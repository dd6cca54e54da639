#include "prodbg/diff.hpp"

#include <stdexcept>

namespace prodbg {
namespace {

bool same_shape(const TermPtr& a, const TermPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Atom:
    case TermKind::Var:
      return a->text == b->text;
    case TermKind::Int:
      return a->value == b->value;
    case TermKind::Compound:
      if (a->text != b->text) return false;
      break;
    default:
      break;
  }
  if (a->args.size() != b->args.size()) return false;
  return (a->tail == nullptr) == (b->tail == nullptr);
}

void diff_term(const TermPtr& a, const TermPtr& b, NodePath& path,
               std::vector<NodePath>& out) {
  if (!same_shape(a, b)) {
    out.push_back(path);
    return;
  }
  std::vector<TermPtr> ca = term_children(a);
  std::vector<TermPtr> cb = term_children(b);
  for (size_t i = 0; i < ca.size(); ++i) {
    path.push_back(static_cast<int>(i));
    diff_term(ca[i], cb[i], path, out);
    path.pop_back();
  }
}

TermPtr replace_at(const TermPtr& t, const NodePath& path, size_t from,
                   const TermPtr& repl) {
  if (from == path.size()) return repl;
  std::vector<TermPtr> children = term_children(t);
  int i = path[from];
  children[i] = replace_at(children[i], path, from + 1, repl);
  return with_children(t, std::move(children));
}

}  // namespace

std::vector<NodePath> clause_diff(const Clause& a, const Clause& b) {
  std::vector<NodePath> out;
  NodePath path{0};
  diff_term(a.head, b.head, path, out);
  path = {1};
  if (a.body.size() != b.body.size()) {
    out.push_back(path);
    return out;
  }
  for (size_t i = 0; i < a.body.size(); ++i) {
    path = {1, static_cast<int>(i)};
    diff_term(a.body[i], b.body[i], path, out);
  }
  return out;
}

Clause abstract_hint(const Clause& buggy, const Clause& repaired) {
  std::vector<NodePath> paths = clause_diff(buggy, repaired);
  if (paths.empty())
    throw std::invalid_argument("abstract_hint: clauses are identical");
  Clause hint = buggy;
  for (const NodePath& p : paths) {
    if (p[0] == 0) {
      if (p.size() == 1)
        hint.head = mk_hole();
      else
        hint.head = replace_at(hint.head, p, 1, mk_hole());
    } else if (p.size() == 1) {
      hint.body = {mk_hole()};
    } else {
      int i = p[1];
      if (p.size() == 2)
        hint.body[i] = mk_hole();
      else
        hint.body[i] = replace_at(hint.body[i], p, 2, mk_hole());
    }
  }
  return hint;
}

}  // namespace prodbg
