#include <set>
#include <string>

#include "doctest.h"
#include "prodbg/dsl.hpp"
#include "prodbg/ops.hpp"
#include "prodbg/parser.hpp"
#include "prodbg/term.hpp"
#include "test_util.hpp"

using namespace prodbg;

namespace {

bool has_pred(const DSL& d, const std::string& name, int arity) {
  for (const auto& p : d.productions)
    if (p.kind == ProdKind::Predicate && p.symbol == name && p.arity == arity)
      return true;
  return false;
}

bool has_var(const DSL& d, const std::string& name) {
  for (const auto& p : d.productions)
    if (p.kind == ProdKind::Variable && p.symbol == name) return true;
  return false;
}

bool has_int(const DSL& d, long long v) {
  for (const auto& p : d.productions)
    if (p.kind == ProdKind::Integer && p.value == v) return true;
  return false;
}

bool has_op2(const DSL& d, const std::string& sym) {
  for (const auto& p : d.productions)
    if (p.kind == ProdKind::Op2 && p.symbol == sym) return true;
  return false;
}

bool has_kind(const DSL& d, ProdKind k) {
  for (const auto& p : d.productions)
    if (p.kind == k) return true;
  return false;
}

}  // namespace

TEST_CASE("build_dsl inventory for the duplicate program") {
  Program p = parse_program(testutil::read_fixture("dup_buggy.pl"));
  DSL d = build_dsl(p, 1);

  CHECK(d.prod(0).kind == ProdKind::Empty);
  for (int i = 0; i < d.size(); ++i) CHECK(d.prod(i).id == i);

  CHECK(has_pred(d, "duplicate", 2));
  CHECK(has_op2(d, "="));
  CHECK(has_op2(d, "is"));
  CHECK(has_kind(d, ProdKind::List));
  CHECK(has_kind(d, ProdKind::ListC));
  CHECK(has_kind(d, ProdKind::Tuple));
  CHECK(has_kind(d, ProdKind::Curly));
  CHECK(has_kind(d, ProdKind::Anonymous));
  CHECK(has_var(d, "H"));
  CHECK(has_var(d, "T"));
  CHECK(has_var(d, "L1"));
  CHECK(has_var(d, "L2"));
  CHECK(has_var(d, "V0"));
  CHECK(has_var(d, "V1"));
  CHECK(has_int(d, 0));
  CHECK(has_int(d, 1));
}

TEST_CASE("target clause scopes the variable pool") {
  Program p = parse_program(testutil::read_fixture("dup_buggy.pl"));
  DSL base = build_dsl(p, 0);  // duplicate([], []) has no variables
  CHECK(!has_var(base, "H"));
  CHECK(!has_var(base, "T"));
  CHECK(has_var(base, "V0"));

  DSL three = build_dsl(p, 0, 3);
  CHECK(has_var(three, "V2"));
  CHECK(!has_var(base, "V2"));
}

TEST_CASE("maplist use adds curried predicate variants") {
  Program p = parse_program(
      "inc(X, Y, Z) :- Z is X + Y.\n"
      "run(L, R) :- maplist(inc, L, R, R).\n");
  DSL d = build_dsl(p, 1);
  CHECK(has_pred(d, "inc", 3));
  CHECK(has_pred(d, "inc", 2));
  CHECK(has_pred(d, "inc", 1));

  Program no_ml = parse_program("inc(X, Y, Z) :- Z is X + Y.\n");
  DSL plain = build_dsl(no_ml, 0);
  CHECK(has_pred(plain, "inc", 3));
  CHECK(!has_pred(plain, "inc", 2));
}

TEST_CASE("empty program still yields a usable grammar") {
  Program p = parse_program("a.\n");
  DSL d = build_dsl(p, 0);
  CHECK(d.size() > 1);
  CHECK(d.prod(0).kind == ProdKind::Empty);
  CHECK(has_kind(d, ProdKind::List));
  CHECK(has_int(d, 0));
  CHECK(has_int(d, 1));
}

TEST_CASE("program integers join the constant pool") {
  Program p = parse_program("f(7) :- g(7, 42).\ng(_, _).\n");
  DSL d = build_dsl(p, 0);
  CHECK(has_int(d, 7));
  CHECK(has_int(d, 42));
  CHECK(has_int(d, 0));
  CHECK(has_int(d, 1));
}

TEST_CASE("slot rules encode the arity discipline") {
  Program p = parse_program(testutil::read_fixture("dup_buggy.pl"));
  DSL d = build_dsl(p, 1);

  const Production* dup = nullptr;
  const Production* lst = nullptr;
  const Production* tup = nullptr;
  const Production* emp = nullptr;
  for (const auto& pr : d.productions) {
    if (pr.kind == ProdKind::Predicate && pr.symbol == "duplicate")
      dup = &pr;
    if (pr.kind == ProdKind::List) lst = &pr;
    if (pr.kind == ProdKind::Tuple) tup = &pr;
    if (pr.kind == ProdKind::Empty) emp = &pr;
  }
  REQUIRE(dup != nullptr);
  REQUIRE(lst != nullptr);
  REQUIRE(tup != nullptr);

  CHECK(slot_rule(*dup, 0, 3) == SlotRule::Required);
  CHECK(slot_rule(*dup, 1, 3) == SlotRule::Required);
  CHECK(slot_rule(*dup, 2, 3) == SlotRule::MustBeEmpty);
  CHECK(required_children(*dup, 3) == 2);

  CHECK(slot_rule(*lst, 0, 3) == SlotRule::Optional);
  CHECK(slot_rule(*lst, 2, 3) == SlotRule::Optional);
  CHECK(required_children(*lst, 3) == 0);

  CHECK(slot_rule(*tup, 0, 3) == SlotRule::Optional);

  REQUIRE(emp != nullptr);
  CHECK(slot_rule(*emp, 0, 3) == SlotRule::MustBeEmpty);
  CHECK(required_children(*emp, 3) == 0);
}

TEST_CASE("find_production resolves terms to productions") {
  Program p = parse_program(testutil::read_fixture("dup_buggy.pl"));
  DSL d = build_dsl(p, 1);

  int dup = find_production(d, parse_term_text("duplicate(X, Y)."), true);
  REQUIRE(dup >= 0);
  CHECK(d.prod(dup).kind == ProdKind::Predicate);
  CHECK(d.prod(dup).symbol == "duplicate");

  int h = find_production(d, parse_term_text("H."), false);
  REQUIRE(h >= 0);
  CHECK(d.prod(h).kind == ProdKind::Variable);

  int one = find_production(d, parse_term_text("1."), false);
  REQUIRE(one >= 0);
  CHECK(d.prod(one).kind == ProdKind::Integer);

  CHECK(find_production(d, parse_term_text("zzz(1, 2, 3)."), true) == -1);
}

TEST_CASE("operator tables for the mutation grammar") {
  CHECK(infix_op("=") != nullptr);
  CHECK(infix_op("is") != nullptr);
  CHECK(prefix_op("\\+") != nullptr);
  CHECK(infix_op("nosuchop") == nullptr);
  for (const auto& op : dsl_binary_ops()) {
    CHECK(op.name != ",");
    CHECK(op.name != ":-");
  }
  CHECK(is_comparison_op("<"));
  CHECK(is_comparison_op(">="));
  CHECK(!is_comparison_op("="));
}
