#include "prodbg/builtins.hpp"

#include "prodbg/parser.hpp"

namespace prodbg {

namespace {

const char* kLibrarySource = R"PL(
member(X, [X|_]).
member(X, [_|T]) :- member(X, T).
append([], L, L).
append([H|T], L, [H|R]) :- append(T, L, R).
length([], 0).
length([_|T], N) :- length(T, M), N is M + 1.
between(L, H, L) :- L =< H.
between(L, H, X) :- L < H, L2 is L + 1, between(L2, H, X).
maplist(_, []).
maplist(G, [X|T]) :- call(G, X), maplist(G, T).
maplist(_, [], []).
maplist(G, [X|Xs], [Y|Ys]) :- call(G, X, Y), maplist(G, Xs, Ys).
maplist(_, [], [], []).
maplist(G, [X|Xs], [Y|Ys], [Z|Zs]) :- call(G, X, Y, Z), maplist(G, Xs, Ys, Zs).
)PL";

}  // namespace

const Program& library_program() {
  static const Program p = parse_program(kLibrarySource);
  return p;
}

const std::set<PredKey>& native_builtins() {
  static const std::set<PredKey> s = {
      {"=", 2},  {"\\=", 2},  {"==", 2}, {"\\==", 2}, {"is", 2},
      {"=:=", 2}, {"=\\=", 2}, {"<", 2},  {">", 2},    {"=<", 2},
      {">=", 2},  {"true", 0}, {"fail", 0}, {"msort", 2},
  };
  return s;
}

const std::set<PredKey>& control_constructs() {
  static const std::set<PredKey> s = {
      {",", 2},    {";", 2},    {"->", 2},   {"\\+", 1}, {"!", 0},
      {"call", 1}, {"call", 2}, {"call", 3}, {"call", 4},
  };
  return s;
}

bool is_reserved_predicate(const PredKey& k) {
  return native_builtins().count(k) > 0 || control_constructs().count(k) > 0;
}

}  // namespace prodbg
