#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "prodbg/dsl.hpp"
#include "prodbg/mutate.hpp"
#include "prodbg/parser.hpp"
#include "prodbg/pretty.hpp"
#include "prodbg/term.hpp"
#include "test_util.hpp"

using namespace prodbg;

namespace {

std::set<std::string> mutant_texts(const EnumResult& r) {
  std::set<std::string> out;
  for (const auto& m : r.mutants) out.insert(m.text);
  return out;
}

Program dup_buggy() {
  return parse_program(testutil::read_fixture("dup_buggy.pl"));
}

}  // namespace

TEST_CASE("complete_ast pads to uniform shape") {
  Program p = parse_program("a.\n");
  DSL d = build_dsl(p, 0);
  CompletedAst ast = complete_ast(p.clauses[0], d, 2, 3);
  CHECK(ast.depth_cap == 2);
  CHECK(ast.branch_cap == 3);
  CHECK(ast.head.children.size() == 3);
  for (const auto& child : ast.head.children) {
    CHECK(child.prod == 0);
    CHECK(!child.original);
    CHECK(child.children.empty());
  }

  Program dup = dup_buggy();
  DSL dd = build_dsl(dup, 1);
  CHECK_THROWS_AS(complete_ast(dup.clauses[1], dd, 1, 1),
                  std::invalid_argument);

  CompletedAst deflt = complete_ast(dup.clauses[1], dd);
  CHECK(deflt.branch_cap >= 3);
  CHECK(deflt.depth_cap >= 4);
}

TEST_CASE("encode modes and k validation") {
  Program p = dup_buggy();
  DSL d = build_dsl(p, 1);
  CompletedAst ast = complete_ast(p.clauses[1], d);

  CHECK_THROWS_AS(encode(ast, d, p.clauses[1], 0, MutMode::FL),
                  std::invalid_argument);

  EncodedClause fl = encode(ast, d, p.clauses[1], 1, MutMode::FL);
  for (const auto& n : fl.nodes) CHECK(n.binding == Binding::Semi);
  CHECK(fl.extra_roots.empty());

  EncodedClause rep = encode(ast, d, p.clauses[1], 1, MutMode::Repair, 1);
  CHECK(rep.extra_roots.size() == 1);
  bool saw_unbound = false;
  for (const auto& n : rep.nodes)
    if (!n.is_original && n.binding == Binding::Unbound) saw_unbound = true;
  CHECK(saw_unbound);
  CHECK(rep.body_len == 2);
}

TEST_CASE("clause 0 stream contains the three head mutants") {
  Program p = dup_buggy();
  EnumResult r = mutants_for_clause(p, 0, 1, MutMode::FL, 0,
                                    EnumOptions{.budget = 500});
  std::set<std::string> texts = mutant_texts(r);
  CHECK(texts.count("duplicate(_, []).") == 1);
  CHECK(texts.count("duplicate([], V0).") == 1);
  CHECK(texts.count("duplicate([], 1).") == 1);
  CHECK(!r.truncated);
  CHECK(r.mutants.size() == 38);
}

TEST_CASE("clause 1 stream contains the three body mutants") {
  Program p = dup_buggy();
  EnumResult r = mutants_for_clause(p, 1, 1, MutMode::FL, 0,
                                    EnumOptions{.budget = 500});
  std::set<std::string> texts = mutant_texts(r);
  CHECK(texts.count("duplicate([H|T], L2) :- duplicate(T, L1), L2 is (H, H, "
                    "L1).") == 1);
  CHECK(texts.count("duplicate([H|T], L2) :- duplicate(T, L1), L2 = (H, _, "
                    "L1).") == 1);
  CHECK(texts.count("duplicate([H|T], L2) :- duplicate(T, L1), L2 = [H, H, "
                    "L1].") == 1);
  CHECK(!r.truncated);
  CHECK(r.mutants.size() == 186);
}

TEST_CASE("stream has no textual duplicates and excludes the original") {
  Program p = dup_buggy();
  for (int clause = 0; clause < 2; ++clause) {
    CAPTURE(clause);
    EnumResult r = mutants_for_clause(p, clause, 1, MutMode::FL, 0,
                                      EnumOptions{.budget = 500});
    std::set<std::string> texts = mutant_texts(r);
    CHECK(texts.size() == r.mutants.size());
    CHECK(texts.count(pretty_clause(p.clauses[clause])) == 0);
  }
}

TEST_CASE("every mutant parses, differs in one clause, and is well typed") {
  Program p = dup_buggy();
  EnumResult r = mutants_for_clause(p, 1, 1, MutMode::FL, 0,
                                    EnumOptions{.budget = 500});
  for (const auto& m : r.mutants) {
    CAPTURE(m.text);
    CHECK(m.k == 1);
    CHECK(m.origin_clause == 1);
    CHECK(m.changed_paths.size() == 1);
    Program reparsed = parse_program(pretty_program(m.program));
    CHECK(reparsed.clauses.size() == p.clauses.size());
    CHECK(pretty_clause(reparsed.clauses[0]) == pretty_clause(p.clauses[0]));
    CHECK(pretty_clause(m.clause) == m.text);
  }
}

TEST_CASE("budget truncates the stream") {
  Program p = dup_buggy();
  EnumResult one = mutants_for_clause(p, 1, 1, MutMode::FL, 0,
                                      EnumOptions{.budget = 1});
  CHECK(one.mutants.size() == 1);
  CHECK(one.truncated);

  EnumResult zero = mutants_for_clause(p, 1, 1, MutMode::FL, 0,
                                       EnumOptions{.budget = 0});
  CHECK(zero.mutants.empty());
}

TEST_CASE("enumeration is deterministic") {
  Program p = dup_buggy();
  EnumResult a = mutants_for_clause(p, 1, 1, MutMode::FL, 0,
                                    EnumOptions{.budget = 100});
  EnumResult b = mutants_for_clause(p, 1, 1, MutMode::FL, 0,
                                    EnumOptions{.budget = 100});
  REQUIRE(a.mutants.size() == b.mutants.size());
  for (size_t i = 0; i < a.mutants.size(); ++i)
    CHECK(a.mutants[i].text == b.mutants[i].text);
}

TEST_CASE("repair stream reaches the correct duplicate fix") {
  Program p = dup_buggy();
  EnumResult r = mutants_for_clause(p, 1, 1, MutMode::Repair, 1,
                                    EnumOptions{.budget = 200});
  std::vector<std::string> texts;
  for (const auto& m : r.mutants) texts.push_back(m.text);
  const std::string fix =
      "duplicate([H|T], L2) :- duplicate(T, L1), L2 = [H, H|L1].";
  bool found = false;
  size_t index = 0;
  for (size_t i = 0; i < texts.size(); ++i)
    if (texts[i] == fix) {
      found = true;
      index = i;
      break;
    }
  REQUIRE(found);
  CHECK(index == 53);
}

TEST_CASE("decode rejects slot violations") {
  Program p = dup_buggy();
  DSL d = build_dsl(p, 0);
  CompletedAst ast = complete_ast(p.clauses[0], d, 0, 0);
  EncodedClause enc = encode(ast, d, p.clauses[0], 1, MutMode::FL);

  MutModel original;
  for (const auto& n : enc.nodes) original.assignment.push_back(n.orig);

  MutModel bad = original;
  int first_arg = enc.nodes[enc.head_root].children.at(0);
  bad.assignment[first_arg] = 0;  // required slot emptied
  CHECK_THROWS_AS(decode(bad, enc, p), std::invalid_argument);

  MutModel headless = original;
  headless.assignment[enc.head_root] = 0;
  CHECK_THROWS_AS(decode(headless, enc, p), std::invalid_argument);

  Mutant same = decode(original, enc, p);
  CHECK(same.text == pretty_clause(p.clauses[0]));
  CHECK(same.changed_paths.empty());
}

TEST_CASE("pruning families hold on emitted mutants") {
  Program p = parse_program(
      "f(a).\n"
      "g(X) :- f(X), f(a).\n");
  EnumResult r = mutants_for_clause(p, 1, 1, MutMode::FL, 0,
                                    EnumOptions{.budget = 2000});
  CHECK(!r.mutants.empty());
  for (const auto& m : r.mutants) {
    CAPTURE(m.text);
    const Clause& c = m.clause;
    CHECK((c.head->kind == TermKind::Compound ||
           c.head->kind == TermKind::Atom));
    if (c.head->kind == TermKind::Compound) {
      for (const auto& arg : c.head->args) {
        bool nested_user = arg->kind == TermKind::Compound &&
                           (arg->text == "f" || arg->text == "g");
        CHECK(!nested_user);
      }
    }
    for (const auto& goal : c.body) {
      if (goal->kind != TermKind::Compound) continue;
      if (goal->text != "f" && goal->text != "g") continue;
      for (const auto& arg : goal->args) {
        bool nested_user = arg->kind == TermKind::Compound &&
                           (arg->text == "f" || arg->text == "g");
        CHECK(!nested_user);
      }
    }
  }
}

TEST_CASE("dump_constraints shows domains and cardinality") {
  Program p = dup_buggy();
  DSL d = build_dsl(p, 0);
  CompletedAst ast = complete_ast(p.clauses[0], d, 0, 0);
  EncodedClause enc = encode(ast, d, p.clauses[0], 1, MutMode::FL);
  std::string dump = dump_constraints(enc);
  CHECK(dump.find("node 0") != std::string::npos);
  CHECK(dump.find("domain") != std::string::npos);
  CHECK(dump.find("card 1") != std::string::npos);
  CHECK(dump.find("type-impl") != std::string::npos);
}

TEST_CASE("blocking records appear when requested") {
  Program p = dup_buggy();
  EnumOptions opts;
  opts.budget = 5;
  opts.record_blocks = true;
  EnumResult r = mutants_for_clause(p, 0, 1, MutMode::FL, 0, opts);
  CHECK(r.blocks.size() == r.mutants.size());
  for (const auto& b : r.blocks) CHECK(b.find("block") != std::string::npos);
}
