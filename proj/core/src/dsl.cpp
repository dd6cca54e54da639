#include "prodbg/dsl.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "prodbg/builtins.hpp"
#include "prodbg/callgraph.hpp"
#include "prodbg/ops.hpp"

namespace prodbg {

const char* prod_kind_name(ProdKind k) {
  switch (k) {
    case ProdKind::Empty: return "empty";
    case ProdKind::Predicate: return "pred";
    case ProdKind::Op2: return "op2";
    case ProdKind::Op1: return "op1";
    case ProdKind::List: return "list";
    case ProdKind::ListC: return "list_c";
    case ProdKind::Tuple: return "tuple";
    case ProdKind::Curly: return "curly";
    case ProdKind::Atom: return "atom";
    case ProdKind::Variable: return "var";
    case ProdKind::Integer: return "int";
    case ProdKind::Anonymous: return "anon";
    case ProdKind::Cut: return "cut";
  }
  return "?";
}

std::string production_label(const Production& p) {
  switch (p.kind) {
    case ProdKind::Empty: return "empty";
    case ProdKind::Predicate: return p.symbol + "/" + std::to_string(p.arity);
    case ProdKind::Op2:
    case ProdKind::Op1:
    case ProdKind::Atom:
    case ProdKind::Variable: return p.symbol;
    case ProdKind::List: return "list";
    case ProdKind::ListC: return "list_c";
    case ProdKind::Tuple: return "tuple";
    case ProdKind::Curly: return "curly";
    case ProdKind::Integer: return std::to_string(p.value);
    case ProdKind::Anonymous: return "_";
    case ProdKind::Cut: return "!";
  }
  return "?";
}

SlotRule slot_rule(const Production& p, int slot, int cap) {
  switch (p.kind) {
    case ProdKind::Predicate:
      return slot < p.arity ? SlotRule::Required : SlotRule::MustBeEmpty;
    case ProdKind::Op2:
      return slot < 2 ? SlotRule::Required : SlotRule::MustBeEmpty;
    case ProdKind::Op1:
      return slot < 1 ? SlotRule::Required : SlotRule::MustBeEmpty;
    case ProdKind::List:
    case ProdKind::Curly:
      return SlotRule::Optional;
    case ProdKind::ListC:
      return (slot == 0 || slot == cap - 1) ? SlotRule::Required
                                            : SlotRule::Optional;
    case ProdKind::Tuple:
      return slot < 2 ? SlotRule::Required : SlotRule::Optional;
    case ProdKind::Empty:
    case ProdKind::Atom:
    case ProdKind::Variable:
    case ProdKind::Integer:
    case ProdKind::Anonymous:
    case ProdKind::Cut:
      return SlotRule::MustBeEmpty;
  }
  return SlotRule::MustBeEmpty;
}

int required_children(const Production& p, int cap) {
  (void)cap;
  switch (p.kind) {
    case ProdKind::Predicate: return p.arity;
    case ProdKind::Op2: return 2;
    case ProdKind::Op1: return 1;
    case ProdKind::ListC:
    case ProdKind::Tuple: return 2;
    default: return 0;
  }
}

namespace {

bool op_shaped(const PredKey& k) {
  return (k.arity == 2 && infix_op(k.name)) ||
         (k.arity == 1 && prefix_op(k.name));
}

// Atom and integer constants in argument positions; goal-position atoms are
// predicates, not constants.
void scan_consts(const TermPtr& t, bool callable, std::set<std::string>& atoms,
                 std::set<long long>& ints) {
  if (!t) return;
  switch (t->kind) {
    case TermKind::Atom:
      if (!callable) atoms.insert(t->text);
      return;
    case TermKind::Int:
      ints.insert(t->value);
      return;
    case TermKind::Compound: {
      bool control_pair = t->args.size() == 2 &&
                          (t->text == "," || t->text == ";" || t->text == "->");
      if (callable && control_pair) {
        scan_consts(t->args[0], true, atoms, ints);
        scan_consts(t->args[1], true, atoms, ints);
        return;
      }
      if (callable && t->text == "\\+" && t->args.size() == 1) {
        scan_consts(t->args[0], true, atoms, ints);
        return;
      }
      if (callable && t->text == "call" && !t->args.empty()) {
        scan_consts(t->args[0], true, atoms, ints);
        for (std::size_t i = 1; i < t->args.size(); ++i)
          scan_consts(t->args[i], false, atoms, ints);
        return;
      }
      for (const auto& a : t->args) scan_consts(a, false, atoms, ints);
      return;
    }
    case TermKind::Tuple:
      for (const auto& a : t->args) scan_consts(a, callable, atoms, ints);
      return;
    default:
      for (const auto& c : term_children(t))
        scan_consts(c, false, atoms, ints);
      return;
  }
}

}  // namespace

DSL build_dsl(const Program& p, int target_clause_id, int fresh_vars) {
  const Clause* target = nullptr;
  for (const auto& c : p.clauses)
    if (c.id == target_clause_id) target = &c;
  if (!target)
    throw std::invalid_argument("build_dsl: no clause with id " +
                                std::to_string(target_clause_id));

  std::map<PredKey, bool> preds;  // key -> defined by the user program
  for (const auto& c : p.clauses) preds[clause_pred(c)] = true;

  std::set<PredKey> refs;
  for (const auto& c : p.clauses)
    for (const auto& g : c.body) {
      auto s = goal_predicates(g);
      refs.insert(s.begin(), s.end());
    }
  for (const auto& d : p.directives) {
    auto s = goal_predicates(d);
    refs.insert(s.begin(), s.end());
  }
  bool uses_maplist = false;
  for (const auto& k : refs) {
    if (k.name == "maplist") uses_maplist = true;
    if (op_shaped(k) || control_constructs().count(k)) continue;
    if (k.arity == 0 && (k.name == "true" || k.name == "fail")) continue;
    if (!preds.count(k)) preds[k] = false;
  }

  const std::pair<const char*, int> augment[] = {
      {"member", 2},  {"append", 3},  {"length", 2},  {"between", 3},
      {"msort", 2},   {"maplist", 2}, {"maplist", 3}, {"maplist", 4},
  };
  for (const auto& [name, arity] : augment) preds.insert({{name, arity}, false});

  if (uses_maplist) {
    auto base = preds;
    for (const auto& [k, user] : base)
      for (int m = k.arity - 1; m >= 1; --m) {
        auto [it, fresh] = preds.insert({{k.name, m}, user});
        if (!fresh && user) it->second = true;
      }
  }

  std::set<std::string> atoms = {"true", "fail"};
  std::set<long long> ints = {0, 1};
  for (const auto& c : p.clauses) {
    for (const auto& a : c.head->args) scan_consts(a, false, atoms, ints);
    for (const auto& g : c.body) scan_consts(g, true, atoms, ints);
  }
  for (const auto& d : p.directives) scan_consts(d, true, atoms, ints);

  std::set<std::string> vars;
  {
    auto collect = [&vars](const TermPtr& t) {
      for (const auto& v : term_vars(t)) vars.insert(v);
    };
    collect(target->head);
    for (const auto& g : target->body) collect(g);
  }
  for (int i = 0; i < fresh_vars; ++i) vars.insert("V" + std::to_string(i));

  DSL dsl;
  auto add = [&dsl](ProdKind k, std::string sym, long long val, int arity,
                    bool user) {
    Production pr;
    pr.id = dsl.size();
    pr.kind = k;
    pr.symbol = std::move(sym);
    pr.value = val;
    pr.arity = arity;
    pr.user_pred = user;
    dsl.productions.push_back(std::move(pr));
  };

  add(ProdKind::Empty, "", 0, 0, false);
  for (const auto& [k, user] : preds)
    add(ProdKind::Predicate, k.name, 0, k.arity, user);
  {
    std::vector<std::string> names;
    for (const auto& op : dsl_binary_ops()) names.push_back(op.name);
    std::sort(names.begin(), names.end());
    for (const auto& n : names) add(ProdKind::Op2, n, 0, 2, false);
  }
  {
    std::vector<std::string> names;
    for (const auto& op : dsl_prefix_ops()) names.push_back(op.name);
    std::sort(names.begin(), names.end());
    for (const auto& n : names) add(ProdKind::Op1, n, 0, 1, false);
  }
  add(ProdKind::List, "", 0, 0, false);
  add(ProdKind::ListC, "", 0, 0, false);
  add(ProdKind::Tuple, "", 0, 0, false);
  add(ProdKind::Curly, "", 0, 0, false);
  for (const auto& a : atoms) add(ProdKind::Atom, a, 0, 0, false);
  for (const auto& v : vars) add(ProdKind::Variable, v, 0, 0, false);
  for (long long v : ints) add(ProdKind::Integer, "", v, 0, false);
  add(ProdKind::Anonymous, "", 0, 0, false);
  add(ProdKind::Cut, "", 0, 0, false);
  return dsl;
}

int find_production(const DSL& dsl, const TermPtr& t, bool callable_position) {
  auto find = [&dsl](ProdKind k, const std::string& sym, long long val,
                     int arity) {
    for (const auto& p : dsl.productions) {
      if (p.kind != k) continue;
      switch (k) {
        case ProdKind::Predicate:
          if (p.symbol == sym && p.arity == arity) return p.id;
          break;
        case ProdKind::Op2:
        case ProdKind::Op1:
        case ProdKind::Atom:
        case ProdKind::Variable:
          if (p.symbol == sym) return p.id;
          break;
        case ProdKind::Integer:
          if (p.value == val) return p.id;
          break;
        default:
          return p.id;
      }
    }
    return -1;
  };

  switch (t->kind) {
    case TermKind::Atom: {
      if (callable_position) {
        int id = find(ProdKind::Predicate, t->text, 0, 0);
        if (id >= 0) return id;
      }
      return find(ProdKind::Atom, t->text, 0, 0);
    }
    case TermKind::Int: return find(ProdKind::Integer, "", t->value, 0);
    case TermKind::Var: return find(ProdKind::Variable, t->text, 0, 0);
    case TermKind::Anon: return find(ProdKind::Anonymous, "", 0, 0);
    case TermKind::Cut: return find(ProdKind::Cut, "", 0, 0);
    case TermKind::Compound: {
      int n = static_cast<int>(t->args.size());
      if (n == 2 && infix_op(t->text)) {
        int id = find(ProdKind::Op2, t->text, 0, 0);
        if (id >= 0) return id;
      }
      if (n == 1 && prefix_op(t->text)) {
        int id = find(ProdKind::Op1, t->text, 0, 0);
        if (id >= 0) return id;
      }
      return find(ProdKind::Predicate, t->text, 0, n);
    }
    case TermKind::List: return find(ProdKind::List, "", 0, 0);
    case TermKind::ListTail: return find(ProdKind::ListC, "", 0, 0);
    case TermKind::Tuple: return find(ProdKind::Tuple, "", 0, 0);
    case TermKind::Curly: return find(ProdKind::Curly, "", 0, 0);
    case TermKind::Hole: return -1;
  }
  return -1;
}

}  // namespace prodbg
