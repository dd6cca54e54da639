// Constraint-guided mutant enumeration. A clause is completed into a
// fixed-shape tree (uniform branching, uniform depth), each node is a decision
// variable over the grammar's productions, and mutants are the decodings of
// assignments that flip exactly k mutable nodes while respecting each
// production's slot discipline.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "prodbg/diff.hpp"
#include "prodbg/dsl.hpp"
#include "prodbg/program.hpp"

namespace prodbg {

struct AstNode {
  int prod = 0;
  bool original = false;
  std::vector<AstNode> children;
};

struct CompletedAst {
  AstNode head;
  std::vector<AstNode> body;
  int depth_cap = 0;
  int branch_cap = 0;
};

// Pads the clause's syntax tree to uniform shape. Zero caps pick defaults:
// source depth plus one, and the larger of the source branching factor and
// three. Caps below the source shape are an error.
CompletedAst complete_ast(const Clause& c, const DSL& dsl, int depth_cap = 0,
                          int branch_cap = 0);

enum class Binding { Bound, Semi, Unbound };
enum class MutMode { FL, Repair };

struct EncNode {
  int id = 0;
  int parent = -1;
  int slot = 0;
  int depth = 1;
  int orig = 0;  // production this node decodes to when untouched
  Binding binding = Binding::Semi;
  bool is_original = false;
  std::vector<int> children;  // node ids in slot order; empty at max depth
};

// Decision problem for one clause: node variables, their original values and
// binding modes, plus optional extra body roots with insertion positions.
struct EncodedClause {
  DSL dsl;
  Clause original;
  MutMode mode = MutMode::FL;
  int k = 1;
  int depth_cap = 2;
  int branch_cap = 3;
  std::vector<EncNode> nodes;
  int head_root = 0;
  std::vector<int> body_roots;
  std::vector<int> extra_roots;
  int body_len = 0;
};

// Original nodes keep ids 0..n-1 in prefix order (head subtree, then each
// body goal); padding follows, extra roots last. Fault localization makes
// every node semi-bound; repair leaves padding unbound so insertions do not
// count against k.
EncodedClause encode(const CompletedAst& ast, const DSL& dsl, const Clause& c,
                     int k, MutMode mode, int extra_body_roots = 0);

struct MutModel {
  std::vector<int> assignment;  // production id per node id
  std::vector<int> positions;   // body insertion index per extra root
};

struct Mutant {
  Program program;
  Clause clause;
  std::set<NodePath> changed_paths;
  int k = 0;
  int origin_clause = 0;
  std::string text;
};

// Rebuilds the clause a model denotes and splices it into the program.
// Throws std::invalid_argument on models that violate the slot discipline.
Mutant decode(const MutModel& m, const EncodedClause& enc, const Program& p);

struct EnumOptions {
  int budget = 500;
  bool record_blocks = false;
  long long search_limit = 50000000;  // DFS steps before giving up
};

struct EnumResult {
  std::vector<Mutant> mutants;
  bool truncated = false;
  std::vector<std::string> blocks;
};

// Enumerates models in layers by the number of added nodes, within a layer in
// lexicographic node/production order, and decodes each into a mutant. The
// original clause and textual duplicates are skipped; the stream stops at
// `budget` mutants with the truncated flag set.
EnumResult enumerate_mutants(const EncodedClause& enc, const Program& p,
                             const EnumOptions& opts = {});

// Static view of the decision problem: per-node domains, per-production slot
// compatibility, and the change cardinality.
std::string dump_constraints(const EncodedClause& enc);

// build_dsl + complete_ast + encode + enumerate_mutants with default caps.
EnumResult mutants_for_clause(const Program& p, int clause_id, int k,
                              MutMode mode, int extra_body_roots = 0,
                              const EnumOptions& opts = {});

}  // namespace prodbg
