#include "prodbg/term.hpp"

#include <algorithm>
#include <cassert>

namespace prodbg {

namespace {

TermPtr make(Term t) { return std::make_shared<const Term>(std::move(t)); }

const TermPtr& cut_singleton() {
  static const TermPtr t = make(Term{TermKind::Cut, "!"});
  return t;
}

const TermPtr& hole_singleton() {
  static const TermPtr t = make(Term{TermKind::Hole, "?"});
  return t;
}

const TermPtr& anon_singleton() {
  static const TermPtr t = make(Term{TermKind::Anon, "_"});
  return t;
}

}  // namespace

TermPtr mk_atom(std::string name) {
  return make(Term{TermKind::Atom, std::move(name)});
}

TermPtr mk_int(long long v) {
  Term t{TermKind::Int};
  t.value = v;
  return make(std::move(t));
}

TermPtr mk_var(std::string name) {
  return make(Term{TermKind::Var, std::move(name)});
}

TermPtr mk_anon() { return anon_singleton(); }

TermPtr mk_compound(std::string functor, std::vector<TermPtr> args) {
  assert(!args.empty());
  Term t{TermKind::Compound, std::move(functor)};
  t.args = std::move(args);
  return make(std::move(t));
}

TermPtr mk_list(std::vector<TermPtr> elems) {
  Term t{TermKind::List};
  t.args = std::move(elems);
  return make(std::move(t));
}

TermPtr mk_list_tail(std::vector<TermPtr> elems, TermPtr tail) {
  assert(!elems.empty());
  Term t{TermKind::ListTail};
  t.args = std::move(elems);
  t.tail = std::move(tail);
  return make(std::move(t));
}

TermPtr mk_tuple(std::vector<TermPtr> elems) {
  assert(elems.size() >= 1);
  Term t{TermKind::Tuple};
  t.args = std::move(elems);
  return make(std::move(t));
}

TermPtr mk_curly(std::vector<TermPtr> elems) {
  Term t{TermKind::Curly};
  t.args = std::move(elems);
  return make(std::move(t));
}

TermPtr mk_cut() { return cut_singleton(); }
TermPtr mk_hole() { return hole_singleton(); }

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Atom:
    case TermKind::Var:
      return a->text == b->text;
    case TermKind::Int:
      return a->value == b->value;
    case TermKind::Anon:
    case TermKind::Cut:
    case TermKind::Hole:
      return true;
    case TermKind::Compound:
      if (a->text != b->text || a->args.size() != b->args.size()) return false;
      break;
    case TermKind::List:
    case TermKind::Tuple:
    case TermKind::Curly:
      if (a->args.size() != b->args.size()) return false;
      break;
    case TermKind::ListTail:
      if (a->args.size() != b->args.size()) return false;
      if (!term_equal(a->tail, b->tail)) return false;
      break;
  }
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!term_equal(a->args[i], b->args[i])) return false;
  return true;
}

namespace {

// Normalized list view: nil, cons(head, rest), or an improper end term.
struct ListView {
  enum class Kind { Nil, Cons, Other } kind;
  TermPtr head;
  TermPtr rest;
  TermPtr other;
};

ListView list_view(const TermPtr& t) {
  if (t->kind == TermKind::List) {
    if (t->args.empty()) return {ListView::Kind::Nil, nullptr, nullptr, nullptr};
    std::vector<TermPtr> rest(t->args.begin() + 1, t->args.end());
    return {ListView::Kind::Cons, t->args[0], mk_list(std::move(rest)), nullptr};
  }
  if (t->kind == TermKind::ListTail) {
    TermPtr rest;
    if (t->args.size() == 1) {
      rest = t->tail;
    } else {
      std::vector<TermPtr> elems(t->args.begin() + 1, t->args.end());
      rest = mk_list_tail(std::move(elems), t->tail);
    }
    return {ListView::Kind::Cons, t->args[0], rest, nullptr};
  }
  return {ListView::Kind::Other, nullptr, nullptr, t};
}

bool is_listish(const TermPtr& t) {
  return t->kind == TermKind::List || t->kind == TermKind::ListTail;
}

// Tuple pair view: (first, rest). Single-element tuples are transparent.
TermPtr tuple_unwrap(const TermPtr& t) {
  if (t->kind == TermKind::Tuple && t->args.size() == 1) return t->args[0];
  return t;
}

std::pair<TermPtr, TermPtr> tuple_pair(const TermPtr& t) {
  assert(t->kind == TermKind::Tuple && t->args.size() >= 2);
  if (t->args.size() == 2) return {t->args[0], t->args[1]};
  std::vector<TermPtr> rest(t->args.begin() + 1, t->args.end());
  return {t->args[0], mk_tuple(std::move(rest))};
}

}  // namespace

bool term_equal_norm(const TermPtr& a0, const TermPtr& b0) {
  TermPtr a = tuple_unwrap(a0);
  TermPtr b = tuple_unwrap(b0);
  if (a.get() == b.get()) return true;
  if (is_listish(a) && is_listish(b)) {
    ListView va = list_view(a), vb = list_view(b);
    if (va.kind != vb.kind) return false;
    switch (va.kind) {
      case ListView::Kind::Nil:
        return true;
      case ListView::Kind::Cons:
        return term_equal_norm(va.head, vb.head) &&
               term_equal_norm(va.rest, vb.rest);
      case ListView::Kind::Other:
        break;
    }
  }
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Atom:
    case TermKind::Var:
      return a->text == b->text;
    case TermKind::Int:
      return a->value == b->value;
    case TermKind::Anon:
    case TermKind::Cut:
    case TermKind::Hole:
      return true;
    case TermKind::Compound:
      if (a->text != b->text || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!term_equal_norm(a->args[i], b->args[i])) return false;
      return true;
    case TermKind::Tuple: {
      auto [ah, ar] = tuple_pair(a);
      auto [bh, br] = tuple_pair(b);
      return term_equal_norm(ah, bh) && term_equal_norm(ar, br);
    }
    case TermKind::Curly:
      if (a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!term_equal_norm(a->args[i], b->args[i])) return false;
      return true;
    case TermKind::List:
    case TermKind::ListTail:
      return false;  // mixed listish/non-listish handled above
  }
  return false;
}

namespace {

// Order classes for the standard order of terms.
int order_class(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Anon:
      return 0;
    case TermKind::Int:
      return 1;
    case TermKind::Atom:
    case TermKind::Cut:
    case TermKind::Hole:
      return 2;
    case TermKind::List:
      return t->args.empty() ? 2 : 3;  // [] is the atom '[]'
    case TermKind::Curly:
      return t->args.empty() ? 2 : 3;  // {} is the atom '{}'
    case TermKind::Compound:
    case TermKind::ListTail:
    case TermKind::Tuple:
      return 3;
  }
  return 3;
}

std::string atom_name(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Atom:
      return t->text;
    case TermKind::Cut:
      return "!";
    case TermKind::Hole:
      return "?";
    case TermKind::List:
      return "[]";
    case TermKind::Curly:
      return "{}";
    default:
      return t->text;
  }
}

// Canonical compound view: functor, arity, argument fetcher.
struct CompoundView {
  std::string functor;
  size_t arity;
  TermPtr a0, a1;                  // for decomposed listish/tuple/curly
  const std::vector<TermPtr>* args = nullptr;  // for plain compounds
};

CompoundView compound_view(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Compound:
      return {t->text, t->args.size(), nullptr, nullptr, &t->args};
    case TermKind::List:
    case TermKind::ListTail: {
      ListView v = list_view(t);
      return {".", 2, v.head, v.rest, nullptr};
    }
    case TermKind::Tuple: {
      auto [h, r] = tuple_pair(t);
      return {",", 2, h, r, nullptr};
    }
    case TermKind::Curly: {
      TermPtr inner =
          t->args.size() == 1 ? t->args[0] : mk_tuple(t->args);
      return {"{}", 1, inner, nullptr, nullptr};
    }
    default:
      return {"", 0, nullptr, nullptr, nullptr};
  }
}

}  // namespace

int term_compare(const TermPtr& a0, const TermPtr& b0) {
  TermPtr a = tuple_unwrap(a0);
  TermPtr b = tuple_unwrap(b0);
  int ca = order_class(a), cb = order_class(b);
  if (ca != cb) return ca < cb ? -1 : 1;
  switch (ca) {
    case 0:
      return a->text < b->text ? -1 : (a->text > b->text ? 1 : 0);
    case 1:
      return a->value < b->value ? -1 : (a->value > b->value ? 1 : 0);
    case 2: {
      std::string na = atom_name(a), nb = atom_name(b);
      return na < nb ? -1 : (na > nb ? 1 : 0);
    }
    default: {
      CompoundView va = compound_view(a), vb = compound_view(b);
      if (va.arity != vb.arity) return va.arity < vb.arity ? -1 : 1;
      if (va.functor != vb.functor) return va.functor < vb.functor ? -1 : 1;
      for (size_t i = 0; i < va.arity; ++i) {
        TermPtr xa = va.args ? (*va.args)[i] : (i == 0 ? va.a0 : va.a1);
        TermPtr xb = vb.args ? (*vb.args)[i] : (i == 0 ? vb.a0 : vb.a1);
        int c = term_compare(xa, xb);
        if (c != 0) return c;
      }
      return 0;
    }
  }
}

bool contains_hole(const TermPtr& t) {
  if (t->kind == TermKind::Hole) return true;
  for (const auto& a : t->args)
    if (contains_hole(a)) return true;
  return t->tail && contains_hole(t->tail);
}

bool contains_anon(const TermPtr& t) {
  if (t->kind == TermKind::Anon) return true;
  for (const auto& a : t->args)
    if (contains_anon(a)) return true;
  return t->tail && contains_anon(t->tail);
}

int term_depth(const TermPtr& t) {
  int d = 0;
  for (const auto& a : t->args) d = std::max(d, term_depth(a));
  if (t->tail) d = std::max(d, term_depth(t->tail));
  return 1 + d;
}

std::vector<TermPtr> term_children(const TermPtr& t) {
  std::vector<TermPtr> out = t->args;
  if (t->tail) out.push_back(t->tail);
  return out;
}

TermPtr with_children(const TermPtr& t, std::vector<TermPtr> children) {
  assert(children.size() == t->args.size() + (t->tail ? 1 : 0));
  Term n{t->kind, t->text};
  n.value = t->value;
  if (t->tail) {
    n.tail = children.back();
    children.pop_back();
  }
  n.args = std::move(children);
  return std::make_shared<const Term>(std::move(n));
}

void collect_vars(const TermPtr& t, std::vector<std::string>& out) {
  if (t->kind == TermKind::Var) {
    if (std::find(out.begin(), out.end(), t->text) == out.end())
      out.push_back(t->text);
    return;
  }
  for (const auto& a : t->args) collect_vars(a, out);
  if (t->tail) collect_vars(t->tail, out);
}

std::vector<std::string> term_vars(const TermPtr& t) {
  std::vector<std::string> out;
  collect_vars(t, out);
  return out;
}

bool is_callable(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Atom:
    case TermKind::Compound:
    case TermKind::Cut:
    case TermKind::Tuple:
      return true;
    default:
      return false;
  }
}

ConsView cons_view(const TermPtr& t) {
  ListView v = list_view(t);
  switch (v.kind) {
    case ListView::Kind::Nil:
      return {ConsKind::Nil, nullptr, nullptr};
    case ListView::Kind::Cons:
      return {ConsKind::Cons, v.head, v.rest};
    default:
      return {ConsKind::NotList, nullptr, nullptr};
  }
}

TermPtr tuple_unwrap_term(const TermPtr& t) { return tuple_unwrap(t); }

std::pair<TermPtr, TermPtr> tuple_pair_view(const TermPtr& t) {
  return tuple_pair(t);
}

}  // namespace prodbg
