// Term representation for the supported Prolog subset. Terms are immutable and
// shared; list / tuple / curly sugar is kept as written in the source so that
// diffs and printing preserve the student's shapes, while unification and the
// standard order work on a normalized cons/pair view.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace prodbg {

struct SourceSpan {
  int line_begin = 0;
  int col_begin = 0;
  int line_end = 0;
  int col_end = 0;
  bool operator==(const SourceSpan&) const = default;
};

enum class TermKind {
  Atom,
  Int,
  Var,
  Anon,      // a source-level `_`; the engine renames each occurrence fresh
  Compound,  // functor(args...), operators included
  List,      // [a, b, c]; [] is a List with no elements
  ListTail,  // [a, b | T]; at least one element before the tail
  Tuple,     // (a, b, c); a parenthesized comma chain, at least two elements
  Curly,     // {a, b}; {} is a Curly with no elements
  Cut,       // !
  Hole,      // ? placeholder used by hints; never produced by the parser
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  TermKind kind;
  std::string text;           // atom name, variable name, or compound functor
  long long value = 0;        // Int payload
  std::vector<TermPtr> args;  // compound args or list/tuple/curly elements
  TermPtr tail;               // ListTail continuation
};

TermPtr mk_atom(std::string name);
TermPtr mk_int(long long v);
TermPtr mk_var(std::string name);
TermPtr mk_anon();
TermPtr mk_compound(std::string functor, std::vector<TermPtr> args);
TermPtr mk_list(std::vector<TermPtr> elems);
TermPtr mk_list_tail(std::vector<TermPtr> elems, TermPtr tail);
TermPtr mk_tuple(std::vector<TermPtr> elems);
TermPtr mk_curly(std::vector<TermPtr> elems);
TermPtr mk_cut();
TermPtr mk_hole();

// Strict structural equality on the surface representation.
bool term_equal(const TermPtr& a, const TermPtr& b);

// Equality on the normalized view: proper lists written with different sugar
// compare equal, and tuples compare through the right-nested pair view.
bool term_equal_norm(const TermPtr& a, const TermPtr& b);

// Standard order of terms (Var < Int < Atom < Compound), normalized view.
// Returns <0, 0, >0.
int term_compare(const TermPtr& a, const TermPtr& b);

bool contains_hole(const TermPtr& t);
bool contains_anon(const TermPtr& t);

// 1 for a leaf, 1 + max child depth otherwise.
int term_depth(const TermPtr& t);

// Uniform child access used by diffs and mutation: compound args, list/tuple/
// curly elements, and for ListTail the elements followed by the tail last.
std::vector<TermPtr> term_children(const TermPtr& t);

// Rebuild `t` with new children in term_children order. Child count must match.
TermPtr with_children(const TermPtr& t, std::vector<TermPtr> children);

// Named variables in first-occurrence order (Anon excluded).
void collect_vars(const TermPtr& t, std::vector<std::string>& out);
std::vector<std::string> term_vars(const TermPtr& t);

// Callable as a goal: Atom, Compound, Cut, or Tuple (conjunction).
bool is_callable(const TermPtr& t);

// Cons view over list sugar: [] is Nil; [a, b] and [a | T] decompose into
// head and rest; everything else is NotList.
enum class ConsKind { Nil, Cons, NotList };
struct ConsView {
  ConsKind kind;
  TermPtr head;
  TermPtr rest;
};
ConsView cons_view(const TermPtr& t);

// Single-element tuples are transparent wrappers.
TermPtr tuple_unwrap_term(const TermPtr& t);

// (first, rest-as-tuple) of a tuple with >= 2 elements.
std::pair<TermPtr, TermPtr> tuple_pair_view(const TermPtr& t);

}  // namespace prodbg
