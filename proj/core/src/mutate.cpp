#include "prodbg/mutate.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "prodbg/pretty.hpp"

namespace prodbg {

namespace {

AstNode empty_node() {
  AstNode n;
  n.prod = 0;
  n.original = false;
  return n;
}

AstNode ast_of(const DSL& dsl, const TermPtr& t, bool callable) {
  int prod = find_production(dsl, t, callable);
  if (prod < 0)
    throw std::invalid_argument("complete_ast: no production for " +
                                pretty(t));
  AstNode n;
  n.prod = prod;
  n.original = true;
  for (const auto& c : term_children(t))
    n.children.push_back(ast_of(dsl, c, false));
  return n;
}

int ast_depth(const AstNode& n) {
  int d = 1;
  for (const auto& c : n.children) d = std::max(d, 1 + ast_depth(c));
  return d;
}

int ast_branch(const AstNode& n) {
  int b = static_cast<int>(n.children.size());
  for (const auto& c : n.children) b = std::max(b, ast_branch(c));
  return b;
}

void pad_node(AstNode& n, const DSL& dsl, int depth, int depth_cap,
              int branch_cap) {
  if (depth >= depth_cap) {
    if (!n.children.empty())
      throw std::invalid_argument(
          "complete_ast: depth cap below source depth");
    return;
  }
  if (static_cast<int>(n.children.size()) > branch_cap)
    throw std::invalid_argument(
        "complete_ast: branch cap below source branching");
  if (dsl.prod(n.prod).kind == ProdKind::ListC && !n.children.empty()) {
    AstNode tail = std::move(n.children.back());
    n.children.pop_back();
    while (static_cast<int>(n.children.size()) < branch_cap - 1)
      n.children.push_back(empty_node());
    n.children.push_back(std::move(tail));
  } else {
    while (static_cast<int>(n.children.size()) < branch_cap)
      n.children.push_back(empty_node());
  }
  for (auto& c : n.children) pad_node(c, dsl, depth + 1, depth_cap, branch_cap);
}

AstNode full_empty(int depth, int depth_cap, int branch_cap) {
  AstNode n = empty_node();
  if (depth < depth_cap)
    for (int i = 0; i < branch_cap; ++i)
      n.children.push_back(full_empty(depth + 1, depth_cap, branch_cap));
  return n;
}

int body_root_index(const EncodedClause& enc, int id) {
  for (std::size_t b = 0; b < enc.body_roots.size(); ++b)
    if (enc.body_roots[b] == id) return static_cast<int>(b);
  return -1;
}

int extra_root_index(const EncodedClause& enc, int id) {
  for (std::size_t j = 0; j < enc.extra_roots.size(); ++j)
    if (enc.extra_roots[j] == id) return static_cast<int>(j);
  return -1;
}

// Per-node production candidates before parent-dependent rules: root position
// and child capacity only.
std::vector<std::vector<int>> node_domains(const EncodedClause& enc) {
  std::vector<std::vector<int>> domains(enc.nodes.size());
  for (const auto& nd : enc.nodes) {
    bool head = nd.id == enc.head_root;
    bool goal_root =
        body_root_index(enc, nd.id) >= 0 || extra_root_index(enc, nd.id) >= 0;
    bool leaf = nd.children.empty();
    for (int q = 0; q < enc.dsl.size(); ++q) {
      const Production& p = enc.dsl.prod(q);
      if (nd.binding == Binding::Bound && q != nd.orig) continue;
      if (head) {
        if (p.kind != ProdKind::Predicate || !p.user_pred) continue;
      } else if (goal_root) {
        bool callable = p.kind == ProdKind::Empty ||
                        p.kind == ProdKind::Predicate ||
                        p.kind == ProdKind::Op2 || p.kind == ProdKind::Op1 ||
                        p.kind == ProdKind::Cut ||
                        (p.kind == ProdKind::Atom &&
                         (p.symbol == "true" || p.symbol == "fail"));
        if (!callable) continue;
      }
      int req = required_children(p, enc.branch_cap);
      if (leaf ? req > 0 : req > enc.branch_cap) continue;
      domains[nd.id].push_back(q);
    }
  }
  return domains;
}

NodePath path_of(const EncodedClause& enc, int id) {
  NodePath rev;
  int cur = id;
  while (enc.nodes[cur].parent >= 0) {
    rev.push_back(enc.nodes[cur].slot);
    cur = enc.nodes[cur].parent;
  }
  NodePath p;
  if (cur == enc.head_root) {
    p = {0};
  } else if (int b = body_root_index(enc, cur); b >= 0) {
    p = {1, b};
  } else {
    p = {1, enc.body_len + extra_root_index(enc, cur)};
  }
  p.insert(p.end(), rev.rbegin(), rev.rend());
  return p;
}

TermPtr decode_node(const EncodedClause& enc, const std::vector<int>& asg,
                    int id);

std::vector<TermPtr> decode_children(const EncodedClause& enc,
                                     const std::vector<int>& asg,
                                     const EncNode& nd) {
  std::vector<TermPtr> kids(nd.children.size());
  for (std::size_t s = 0; s < nd.children.size(); ++s)
    kids[s] = decode_node(enc, asg, nd.children[s]);
  return kids;
}

TermPtr decode_node(const EncodedClause& enc, const std::vector<int>& asg,
                    int id) {
  const EncNode& nd = enc.nodes[id];
  const Production& p = enc.dsl.prod(asg[id]);
  auto kids = decode_children(enc, asg, nd);
  auto non_null = [&kids] {
    std::vector<TermPtr> v;
    for (const auto& t : kids)
      if (t) v.push_back(t);
    return v;
  };
  auto require_empty_from = [&kids](int s0) {
    for (std::size_t s = s0; s < kids.size(); ++s)
      if (kids[s])
        throw std::invalid_argument("decode: unexpected child in slot " +
                                    std::to_string(s));
  };
  switch (p.kind) {
    case ProdKind::Empty:
      require_empty_from(0);
      return nullptr;
    case ProdKind::Atom:
      require_empty_from(0);
      return mk_atom(p.symbol);
    case ProdKind::Variable:
      require_empty_from(0);
      return mk_var(p.symbol);
    case ProdKind::Integer:
      require_empty_from(0);
      return mk_int(p.value);
    case ProdKind::Anonymous:
      require_empty_from(0);
      return mk_anon();
    case ProdKind::Cut:
      require_empty_from(0);
      return mk_cut();
    case ProdKind::Predicate: {
      std::vector<TermPtr> args;
      for (int s = 0; s < p.arity; ++s) {
        if (s >= static_cast<int>(kids.size()) || !kids[s])
          throw std::invalid_argument("decode: missing argument " +
                                      std::to_string(s) + " of " +
                                      production_label(p));
        args.push_back(kids[s]);
      }
      require_empty_from(p.arity);
      return p.arity == 0 ? mk_atom(p.symbol)
                          : mk_compound(p.symbol, std::move(args));
    }
    case ProdKind::Op2: {
      if (kids.size() < 2 || !kids[0] || !kids[1])
        throw std::invalid_argument("decode: missing operand of " + p.symbol);
      require_empty_from(2);
      return mk_compound(p.symbol, {kids[0], kids[1]});
    }
    case ProdKind::Op1: {
      if (kids.empty() || !kids[0])
        throw std::invalid_argument("decode: missing operand of " + p.symbol);
      require_empty_from(1);
      if (p.symbol == "-" && kids[0]->kind == TermKind::Int &&
          kids[0]->value != std::numeric_limits<long long>::min())
        return mk_int(-kids[0]->value);
      return mk_compound(p.symbol, {kids[0]});
    }
    case ProdKind::List:
      return mk_list(non_null());
    case ProdKind::ListC: {
      if (kids.size() < 2 || !kids[0] || !kids.back())
        throw std::invalid_argument(
            "decode: list cell needs a first element and a tail");
      std::vector<TermPtr> elems;
      for (std::size_t s = 0; s + 1 < kids.size(); ++s)
        if (kids[s]) elems.push_back(kids[s]);
      TermPtr tail = kids.back();
      if (tail->kind == TermKind::List) {
        for (const auto& e : tail->args) elems.push_back(e);
        return mk_list(std::move(elems));
      }
      if (tail->kind == TermKind::ListTail) {
        for (const auto& e : tail->args) elems.push_back(e);
        return mk_list_tail(std::move(elems), tail->tail);
      }
      return mk_list_tail(std::move(elems), tail);
    }
    case ProdKind::Tuple: {
      auto elems = non_null();
      if (elems.size() < 2)
        throw std::invalid_argument("decode: tuple needs two elements");
      return mk_tuple(std::move(elems));
    }
    case ProdKind::Curly: {
      auto elems = non_null();
      if (elems.size() == 1 && elems[0]->kind == TermKind::Tuple)
        return mk_curly(elems[0]->args);
      return mk_curly(std::move(elems));
    }
  }
  throw std::invalid_argument("decode: unknown production kind");
}

}  // namespace

CompletedAst complete_ast(const Clause& c, const DSL& dsl, int depth_cap,
                          int branch_cap) {
  CompletedAst out;
  out.head = ast_of(dsl, c.head, true);
  for (const auto& g : c.body) out.body.push_back(ast_of(dsl, g, true));

  int sd = ast_depth(out.head);
  int sb = ast_branch(out.head);
  for (const auto& b : out.body) {
    sd = std::max(sd, ast_depth(b));
    sb = std::max(sb, ast_branch(b));
  }
  out.depth_cap = depth_cap > 0 ? depth_cap : sd + 1;
  out.branch_cap = branch_cap > 0 ? branch_cap : std::max(sb, 3);
  if (out.depth_cap < sd)
    throw std::invalid_argument("complete_ast: depth cap below source depth");
  pad_node(out.head, dsl, 1, out.depth_cap, out.branch_cap);
  for (auto& b : out.body) pad_node(b, dsl, 1, out.depth_cap, out.branch_cap);
  return out;
}

EncodedClause encode(const CompletedAst& ast, const DSL& dsl, const Clause& c,
                     int k, MutMode mode, int extra_body_roots) {
  EncodedClause enc;
  enc.dsl = dsl;
  enc.original = c;
  enc.mode = mode;
  enc.k = k;
  enc.depth_cap = ast.depth_cap;
  enc.branch_cap = ast.branch_cap;
  enc.body_len = static_cast<int>(ast.body.size());
  if (extra_body_roots < 0)
    throw std::invalid_argument("encode: negative extra body roots");

  std::vector<AstNode> extras;
  for (int j = 0; j < extra_body_roots; ++j)
    extras.push_back(full_empty(1, ast.depth_cap, ast.branch_cap));

  std::map<const AstNode*, int> ids;
  int next = 0;
  std::function<void(const AstNode&)> num_orig = [&](const AstNode& n) {
    if (!n.original) return;
    ids[&n] = next++;
    for (const auto& ch : n.children) num_orig(ch);
  };
  num_orig(ast.head);
  for (const auto& b : ast.body) num_orig(b);
  std::function<void(const AstNode&)> num_pad = [&](const AstNode& n) {
    if (!n.original) ids[&n] = next++;
    for (const auto& ch : n.children) num_pad(ch);
  };
  num_pad(ast.head);
  for (const auto& b : ast.body) num_pad(b);
  for (const auto& e : extras) num_pad(e);

  enc.nodes.resize(next);
  std::function<void(const AstNode&, int, int, int)> fill =
      [&](const AstNode& n, int parent, int slot, int depth) {
        int id = ids.at(&n);
        EncNode& en = enc.nodes[id];
        en.id = id;
        en.parent = parent;
        en.slot = slot;
        en.depth = depth;
        en.orig = n.original ? n.prod : 0;
        en.is_original = n.original;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          en.children.push_back(ids.at(&n.children[i]));
          fill(n.children[i], id, static_cast<int>(i), depth + 1);
        }
      };
  fill(ast.head, -1, 0, 1);
  enc.head_root = ids.at(&ast.head);
  for (const auto& b : ast.body) {
    fill(b, -1, 0, 1);
    enc.body_roots.push_back(ids.at(&b));
  }
  for (const auto& e : extras) {
    fill(e, -1, 0, 1);
    enc.extra_roots.push_back(ids.at(&e));
  }

  for (auto& nd : enc.nodes)
    nd.binding = mode == MutMode::FL
                     ? Binding::Semi
                     : (nd.is_original ? Binding::Semi : Binding::Unbound);
  for (int r : enc.extra_roots) enc.nodes[r].binding = Binding::Semi;

  int semi = 0;
  for (const auto& nd : enc.nodes)
    if (nd.binding == Binding::Semi) ++semi;
  if (k < 1) throw std::invalid_argument("encode: k must be at least 1");
  if (k > semi)
    throw std::invalid_argument("encode: k exceeds the number of mutable nodes");
  return enc;
}

Mutant decode(const MutModel& m, const EncodedClause& enc, const Program& p) {
  int n = static_cast<int>(enc.nodes.size());
  if (static_cast<int>(m.assignment.size()) != n)
    throw std::invalid_argument("decode: assignment size mismatch");
  if (m.positions.size() != enc.extra_roots.size())
    throw std::invalid_argument("decode: position count mismatch");
  for (int q : m.assignment)
    if (q < 0 || q >= enc.dsl.size())
      throw std::invalid_argument("decode: unknown production " +
                                  std::to_string(q));

  TermPtr head = decode_node(enc, m.assignment, enc.head_root);
  if (!head ||
      (head->kind != TermKind::Atom && head->kind != TermKind::Compound))
    throw std::invalid_argument("decode: head must be an atom or compound");

  std::vector<TermPtr> goals;
  for (int r : enc.body_roots)
    goals.push_back(decode_node(enc, m.assignment, r));
  std::vector<TermPtr> extra_goals;
  for (std::size_t j = 0; j < enc.extra_roots.size(); ++j) {
    extra_goals.push_back(decode_node(enc, m.assignment, enc.extra_roots[j]));
    if (extra_goals.back() &&
        (m.positions[j] < 0 || m.positions[j] > enc.body_len))
      throw std::invalid_argument("decode: insertion position out of range");
  }

  Clause nc;
  nc.id = enc.original.id;
  nc.head = head;
  nc.span = enc.original.span;
  for (int pos = 0; pos <= enc.body_len; ++pos) {
    for (std::size_t j = 0; j < extra_goals.size(); ++j)
      if (extra_goals[j] && m.positions[j] == pos)
        nc.body.push_back(extra_goals[j]);
    if (pos < enc.body_len && goals[pos]) nc.body.push_back(goals[pos]);
  }

  Mutant mu;
  mu.clause = nc;
  mu.program = replace_clause(p, nc);
  for (const auto& nd : enc.nodes)
    if (nd.binding == Binding::Semi && m.assignment[nd.id] != nd.orig)
      mu.changed_paths.insert(path_of(enc, nd.id));
  mu.k = static_cast<int>(mu.changed_paths.size());
  mu.origin_clause = nc.id;
  mu.text = pretty_clause(nc);
  return mu;
}

namespace {

struct Enumerator {
  const EncodedClause& enc;
  const Program& prog;
  const EnumOptions& opts;
  int n;
  std::vector<std::vector<int>> domains;
  std::vector<int> semi_after;
  std::vector<int> addable_after;
  std::vector<int> body_index;
  std::vector<int> extra_index;
  std::vector<int> asg;
  std::vector<int> pos;
  int c_target = 0;
  long long steps = 0;
  std::set<std::string> seen;
  EnumResult out;

  explicit Enumerator(const EncodedClause& e, const Program& p,
                      const EnumOptions& o)
      : enc(e), prog(p), opts(o), n(static_cast<int>(e.nodes.size())) {
    domains = node_domains(enc);
    semi_after.assign(n + 1, 0);
    addable_after.assign(n + 1, 0);
    for (int i = n - 1; i >= 0; --i) {
      semi_after[i] =
          semi_after[i + 1] + (enc.nodes[i].binding == Binding::Semi ? 1 : 0);
      addable_after[i] = addable_after[i + 1] + (enc.nodes[i].orig == 0);
    }
    body_index.assign(n, -1);
    extra_index.assign(n, -1);
    for (std::size_t b = 0; b < enc.body_roots.size(); ++b)
      body_index[enc.body_roots[b]] = static_cast<int>(b);
    for (std::size_t j = 0; j < enc.extra_roots.size(); ++j)
      extra_index[enc.extra_roots[j]] = static_cast<int>(j);
    asg.assign(n, 0);
    pos.assign(enc.extra_roots.size(), enc.body_len);
    seen.insert(pretty_clause(enc.original));
  }

  bool dfs(int i, int flips, int added) {
    if (++steps > opts.search_limit) {
      out.truncated = true;
      return false;
    }
    if (i == n) return positions(0);
    const EncNode& nd = enc.nodes[i];
    const Production* pp =
        nd.parent >= 0 ? &enc.dsl.prod(asg[nd.parent]) : nullptr;
    SlotRule rule = pp ? slot_rule(*pp, nd.slot, enc.branch_cap)
                       : SlotRule::Optional;
    for (int q : domains[i]) {
      bool empty = q == 0;
      if (rule == SlotRule::MustBeEmpty && !empty) break;
      if (rule == SlotRule::Required && empty) continue;
      const Production& pq = enc.dsl.prod(q);
      if (pp && pp->kind == ProdKind::Predicate && pp->user_pred &&
          pq.kind == ProdKind::Predicate && pq.user_pred)
        continue;
      if (!empty && body_index[i] > 0 &&
          asg[enc.body_roots[body_index[i] - 1]] == 0)
        break;
      if (!empty && extra_index[i] > 0 &&
          asg[enc.extra_roots[extra_index[i] - 1]] == 0)
        break;
      int nf =
          flips + (nd.binding == Binding::Semi && q != nd.orig ? 1 : 0);
      if (nf > enc.k || nf + semi_after[i + 1] < enc.k) continue;
      int na = added + (nd.orig == 0 && !empty ? 1 : 0);
      if (na > c_target || na + addable_after[i + 1] < c_target) continue;
      asg[i] = q;
      if (!dfs(i + 1, nf, na)) return false;
    }
    return true;
  }

  bool positions(int j) {
    if (j == static_cast<int>(enc.extra_roots.size())) return emit();
    if (asg[enc.extra_roots[j]] == 0) {
      pos[j] = enc.body_len;
      return positions(j + 1);
    }
    for (int p = 0; p <= enc.body_len; ++p) {
      pos[j] = p;
      if (!positions(j + 1)) return false;
    }
    return true;
  }

  bool emit() {
    MutModel m;
    m.assignment = asg;
    m.positions = pos;
    Mutant mu = decode(m, enc, prog);
    if (!seen.insert(mu.text).second) return true;
    if (opts.record_blocks) {
      std::ostringstream os;
      os << "block {";
      bool first = true;
      for (int i = 0; i < n; ++i)
        if (asg[i] != enc.nodes[i].orig) {
          os << (first ? "" : " ") << "n" << i << "=" << asg[i];
          first = false;
        }
      for (std::size_t j = 0; j < enc.extra_roots.size(); ++j)
        if (asg[enc.extra_roots[j]] != 0) {
          os << (first ? "" : " ") << "p" << j << "=" << pos[j];
          first = false;
        }
      os << "}";
      out.blocks.push_back(os.str());
    }
    out.mutants.push_back(std::move(mu));
    if (static_cast<int>(out.mutants.size()) >= opts.budget) {
      out.truncated = true;
      return false;
    }
    return true;
  }
};

}  // namespace

EnumResult enumerate_mutants(const EncodedClause& enc, const Program& p,
                             const EnumOptions& opts) {
  if (opts.budget < 1) return {};
  Enumerator e(enc, p, opts);
  int addable_total = e.addable_after[0];
  for (int c = 0; c <= addable_total; ++c) {
    e.c_target = c;
    if (!e.dfs(0, 0, 0)) break;
  }
  return std::move(e.out);
}

std::string dump_constraints(const EncodedClause& enc) {
  std::ostringstream os;
  auto domains = node_domains(enc);
  for (std::size_t i = 0; i < domains.size(); ++i) {
    os << "node " << i << " domain [";
    for (std::size_t j = 0; j < domains[i].size(); ++j)
      os << (j ? " " : "") << domains[i][j];
    os << "]\n";
  }
  for (int q = 0; q < enc.dsl.size(); ++q) {
    const Production& p = enc.dsl.prod(q);
    bool interior = false;
    for (int s = 0; s < enc.branch_cap; ++s)
      if (slot_rule(p, s, enc.branch_cap) != SlotRule::MustBeEmpty)
        interior = true;
    if (!interior) continue;
    for (int s = 0; s < enc.branch_cap; ++s) {
      os << "type-impl " << q << " child " << s << " {";
      SlotRule rule = slot_rule(p, s, enc.branch_cap);
      bool first = true;
      for (int r = 0; r < enc.dsl.size(); ++r) {
        if (rule == SlotRule::MustBeEmpty && r != 0) continue;
        if (rule == SlotRule::Required && r == 0) continue;
        os << (first ? "" : " ") << r;
        first = false;
      }
      os << "}\n";
    }
  }
  os << "card " << enc.k << "\n";
  return os.str();
}

EnumResult mutants_for_clause(const Program& p, int clause_id, int k,
                              MutMode mode, int extra_body_roots,
                              const EnumOptions& opts) {
  const Clause* c = nullptr;
  for (const auto& cl : p.clauses)
    if (cl.id == clause_id) c = &cl;
  if (!c)
    throw std::invalid_argument("mutants_for_clause: no clause with id " +
                                std::to_string(clause_id));
  DSL dsl = build_dsl(p, clause_id);
  auto ast = complete_ast(*c, dsl);
  auto enc = encode(ast, dsl, *c, k, mode, extra_body_roots);
  return enumerate_mutants(enc, p, opts);
}

}  // namespace prodbg
