#include <set>
#include <string>

#include "doctest.h"
#include "oracle_mutate.hpp"
#include "prodbg/mutate.hpp"
#include "prodbg/parser.hpp"

using namespace prodbg;

namespace {

std::set<std::string> engine_mutants(const oracle::TinyCase& tc) {
  Program p = parse_program(tc.clause_text + "\n");
  CompletedAst ast = complete_ast(p.clauses[0], tc.dsl, 2, 2);
  EncodedClause enc = encode(ast, tc.dsl, p.clauses[0], 1, MutMode::FL, 0);
  EnumOptions opts;
  opts.budget = 100000;
  EnumResult r = enumerate_mutants(enc, p, opts);
  REQUIRE(!r.truncated);
  std::set<std::string> out;
  for (const auto& m : r.mutants) {
    CHECK(out.count(m.text) == 0);
    out.insert(m.text);
  }
  return out;
}

}  // namespace

TEST_CASE("hand-checked tiny grammar") {
  // p(X) :- q(X). over {empty, p/1, q/1, X}: the only k=1 mutants swap the
  // head or the body-goal functor.
  oracle::TinyCase tc;
  tc.clause_text = "p(X) :- q(X).";
  Production empty;
  empty.id = 0;
  empty.kind = ProdKind::Empty;
  tc.dsl.productions.push_back(empty);
  Production pp;
  pp.id = 1;
  pp.kind = ProdKind::Predicate;
  pp.symbol = "p";
  pp.arity = 1;
  pp.user_pred = true;
  tc.dsl.productions.push_back(pp);
  Production q = pp;
  q.id = 2;
  q.symbol = "q";
  tc.dsl.productions.push_back(q);
  Production x;
  x.id = 3;
  x.kind = ProdKind::Variable;
  x.symbol = "X";
  tc.dsl.productions.push_back(x);

  std::set<std::string> expected = {"q(X) :- q(X).", "p(X) :- p(X)."};
  CHECK(oracle::oracle_mutants(tc) == expected);
  CHECK(engine_mutants(tc) == expected);
}

TEST_CASE("engine equals the exhaustive oracle on seeded tiny grammars") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    oracle::TinyCase tc = oracle::gen_tiny_case(seed);
    CAPTURE(seed);
    CAPTURE(tc.clause_text);
    std::string labels;
    for (const auto& pr : tc.dsl.productions)
      labels += production_label(pr) + " ";
    CAPTURE(labels);
    std::set<std::string> want = oracle::oracle_mutants(tc);
    std::set<std::string> got = engine_mutants(tc);
    CHECK(got == want);
  }
}
