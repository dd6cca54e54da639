#include "prodbg/engine.hpp"

#include <chrono>
#include <climits>
#include <memory>
#include <unordered_map>

#include "prodbg/builtins.hpp"
#include "prodbg/pretty.hpp"

namespace prodbg {

const char* port_name(Port p) {
  switch (p) {
    case Port::Call: return "call";
    case Port::Exit: return "exit";
    case Port::Redo: return "redo";
    case Port::Fail: return "fail";
  }
  return "?";
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Success: return "success";
    case SolveStatus::Failure: return "failure";
    case SolveStatus::ResourceLimit: return "resource_limit";
    case SolveStatus::RuntimeError: return "runtime_error";
  }
  return "?";
}

namespace {

struct Abort {
  SolveStatus status;
  std::string msg;
};

constexpr long long kSubstituteBudget = 1 << 20;
// Occurs check is off, so cyclic bindings are representable; recursion depth
// caps turn the otherwise unbounded walks over them into clean aborts.
constexpr int kTermDepthLimit = 10000;

struct Store {
  std::unordered_map<std::string, TermPtr> map;
  std::vector<std::string> trail;

  size_t mark() const { return trail.size(); }
  void bind(const std::string& name, TermPtr t) {
    map[name] = std::move(t);
    trail.push_back(name);
  }
  void undo_to(size_t m) {
    while (trail.size() > m) {
      map.erase(trail.back());
      trail.pop_back();
    }
  }
  TermPtr deref(TermPtr t) const {
    while (t->kind == TermKind::Var) {
      auto it = map.find(t->text);
      if (it == map.end()) break;
      t = it->second;
    }
    return t;
  }
};

bool listish(const TermPtr& t) {
  return t->kind == TermKind::List || t->kind == TermKind::ListTail;
}

bool unify(Store& s, TermPtr a, TermPtr b, int depth = 0) {
  if (depth > kTermDepthLimit)
    throw Abort{SolveStatus::RuntimeError,
                "term depth limit exceeded during unification"};
  a = tuple_unwrap_term(s.deref(a));
  b = tuple_unwrap_term(s.deref(b));
  if (a.get() == b.get()) return true;
  if (a->kind == TermKind::Var) {
    if (b->kind == TermKind::Var && b->text == a->text) return true;
    s.bind(a->text, b);
    return true;
  }
  if (b->kind == TermKind::Var) {
    s.bind(b->text, a);
    return true;
  }
  if (a->kind == TermKind::Anon || b->kind == TermKind::Anon) return true;
  // List spines are walked iteratively so that long lists cost constant
  // stack; only the element unifications recurse.
  for (long long spine = 0; listish(a) && listish(b); ++spine) {
    if (spine > kSubstituteBudget)
      throw Abort{SolveStatus::RuntimeError,
                  "term size limit exceeded during unification"};
    ConsView va = cons_view(a), vb = cons_view(b);
    if (va.kind != vb.kind) return false;
    if (va.kind == ConsKind::Nil) return true;
    if (!unify(s, va.head, vb.head, depth + 1)) return false;
    a = tuple_unwrap_term(s.deref(va.rest));
    b = tuple_unwrap_term(s.deref(vb.rest));
    if (a.get() == b.get()) return true;
    if (a->kind == TermKind::Var || b->kind == TermKind::Var ||
        a->kind == TermKind::Anon || b->kind == TermKind::Anon)
      return unify(s, a, b, depth + 1);
  }
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Atom:
      return a->text == b->text;
    case TermKind::Int:
      return a->value == b->value;
    case TermKind::Cut:
      return true;
    case TermKind::Compound: {
      if (a->text != b->text || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!unify(s, a->args[i], b->args[i], depth + 1)) return false;
      return true;
    }
    case TermKind::Tuple: {
      auto [ah, ar] = tuple_pair_view(a);
      auto [bh, br] = tuple_pair_view(b);
      return unify(s, ah, bh, depth + 1) && unify(s, ar, br, depth + 1);
    }
    case TermKind::Curly: {
      if (a->args.empty() || b->args.empty())
        return a->args.empty() && b->args.empty();
      TermPtr ia = a->args.size() == 1 ? a->args[0] : mk_tuple(a->args);
      TermPtr ib = b->args.size() == 1 ? b->args[0] : mk_tuple(b->args);
      return unify(s, ia, ib, depth + 1);
    }
    default:
      return false;
  }
}

TermPtr substitute_impl(const Store& s, const TermPtr& t0, long long& budget,
                        int depth) {
  if (--budget < 0)
    throw Abort{SolveStatus::RuntimeError,
                "term size limit exceeded during substitution"};
  if (depth > kTermDepthLimit)
    throw Abort{SolveStatus::RuntimeError,
                "term depth limit exceeded during substitution"};
  TermPtr t = s.deref(t0);
  if (listish(t)) {
    // Walk the spine iteratively and rebuild in the canonical
    // [e1, ..., en | Tail] shape, so cons chains built one cell at a time
    // come out flat and cost constant stack.
    std::vector<TermPtr> elems;
    TermPtr tail;
    for (TermPtr cur = t;;) {
      if (--budget < 0)
        throw Abort{SolveStatus::RuntimeError,
                    "term size limit exceeded during substitution"};
      for (const auto& e : cur->args)
        elems.push_back(substitute_impl(s, e, budget, depth + 1));
      if (cur->kind == TermKind::List) break;
      TermPtr next = s.deref(cur->tail);
      if (listish(next)) {
        cur = next;
        continue;
      }
      tail = substitute_impl(s, next, budget, depth + 1);
      break;
    }
    if (!tail) return mk_list(std::move(elems));
    if (elems.empty()) return tail;
    return mk_list_tail(std::move(elems), tail);
  }
  if (t->args.empty() && !t->tail) return t;
  std::vector<TermPtr> children = term_children(t);
  bool changed = false;
  for (TermPtr& c : children) {
    TermPtr n = substitute_impl(s, c, budget, depth + 1);
    if (n.get() != c.get()) {
      c = n;
      changed = true;
    }
  }
  if (!changed) return t;
  return with_children(t, std::move(children));
}

TermPtr snapshot_term(const Store& s, const TermPtr& t) {
  long long budget = kSubstituteBudget;
  return substitute_impl(s, t, budget, 0);
}

long long eval_arith_store(const Store& s, const TermPtr& t0, int depth = 0) {
  if (depth > kTermDepthLimit)
    throw Abort{SolveStatus::RuntimeError,
                "term depth limit exceeded in arithmetic"};
  TermPtr t = s.deref(t0);
  switch (t->kind) {
    case TermKind::Int:
      return t->value;
    case TermKind::Var:
    case TermKind::Anon:
      throw Abort{SolveStatus::RuntimeError,
                  "arguments are not sufficiently instantiated"};
    case TermKind::Compound:
      break;
    default:
      throw Abort{SolveStatus::RuntimeError,
                  "not an arithmetic expression: " + pretty(t)};
  }
  const std::string& f = t->text;
  auto overflow = [] {
    return Abort{SolveStatus::RuntimeError, "integer overflow"};
  };
  if (f == "-" && t->args.size() == 1) {
    long long v = eval_arith_store(s, t->args[0], depth + 1);
    long long r;
    if (__builtin_sub_overflow(0LL, v, &r)) throw overflow();
    return r;
  }
  if (t->args.size() != 2)
    throw Abort{SolveStatus::RuntimeError,
                "not an arithmetic expression: " + pretty(t)};
  long long a = eval_arith_store(s, t->args[0], depth + 1);
  long long b = eval_arith_store(s, t->args[1], depth + 1);
  long long r = 0;
  if (f == "+") {
    if (__builtin_add_overflow(a, b, &r)) throw overflow();
    return r;
  }
  if (f == "-") {
    if (__builtin_sub_overflow(a, b, &r)) throw overflow();
    return r;
  }
  if (f == "*") {
    if (__builtin_mul_overflow(a, b, &r)) throw overflow();
    return r;
  }
  if (f == "/") {
    if (b == 0) throw Abort{SolveStatus::RuntimeError, "division by zero"};
    if (a == LLONG_MIN && b == -1) throw overflow();
    if (a % b != 0)
      throw Abort{SolveStatus::RuntimeError,
                  "/ on non-divisible operands: " + std::to_string(a) + " / " +
                      std::to_string(b)};
    return a / b;
  }
  if (f == "//") {
    if (b == 0) throw Abort{SolveStatus::RuntimeError, "division by zero"};
    if (a == LLONG_MIN && b == -1) throw overflow();
    return a / b;
  }
  if (f == "mod") {
    if (b == 0) throw Abort{SolveStatus::RuntimeError, "division by zero"};
    if (b == -1) return 0;
    long long m = a % b;
    if (m != 0 && (m < 0) != (b < 0)) m += b;
    return m;
  }
  throw Abort{SolveStatus::RuntimeError,
              "not an arithmetic expression: " + pretty(t)};
}

struct Box {
  TermPtr goal;
  int depth = 0;
  int parent = -1;
  enum class St { Open, Exited, Dead } state = St::Open;
  std::optional<int> cid;  // current clause attempt, user clauses only
  Port last = Port::Call;
  bool any_event = false;
};

struct Item {
  enum class K { Goal, Exit, Commit } kind = K::Goal;
  TermPtr goal;         // Goal: the goal; Commit: the then-branch
  int depth = 0;
  size_t barrier = 0;   // choicepoint-stack height a cut restores
  int ebox = -1;        // enclosing activation, -1 at query level
  int box = -1;         // Exit: box to close
  size_t cp_index = 0;  // Commit: choicepoint index to discard down to
};

struct Cont {
  Item item;
  std::shared_ptr<const Cont> next;
};
using ContPtr = std::shared_ptr<const Cont>;

ContPtr cons_item(Item i, ContPtr next) {
  return std::make_shared<const Cont>(Cont{std::move(i), std::move(next)});
}

struct CP {
  enum class K { Clauses, Branch } kind = K::Clauses;
  int owner = -1;
  size_t trail_mark = 0;
  size_t boxes_mark = 0;
  ContPtr cont;
  // Clauses
  TermPtr goal;
  const std::vector<int>* candidates = nullptr;
  size_t next_idx = 0;
  int depth = 0;
  // Branch
  TermPtr branch;
  int branch_depth = 0;
  size_t branch_barrier = 0;
  int branch_ebox = -1;
};

class Machine {
 public:
  Machine(const Program& user, const EngineOptions& opts)
      : opts_(opts), user_count_(static_cast<int>(user.clauses.size())) {
    all_ = user.clauses;
    for (const Clause& c : library_program().clauses) {
      Clause lc = c;
      lc.id = static_cast<int>(all_.size());
      all_.push_back(std::move(lc));
    }
    for (int i = user_count_; i < static_cast<int>(all_.size()); ++i)
      index_[clause_pred(all_[i])].push_back(i);
    std::map<PredKey, std::vector<int>> user_idx;
    for (int i = 0; i < user_count_; ++i)
      user_idx[clause_pred(all_[i])].push_back(i);
    for (auto& [k, v] : user_idx) index_[k] = v;
    start_ = std::chrono::steady_clock::now();
  }

  QueryOutcome run(const std::vector<TermPtr>& goals) {
    QueryOutcome out;
    std::vector<std::string> qvars;
    for (const TermPtr& g : goals) collect_vars(g, qvars);
    try {
      ContPtr cont;
      for (auto it = goals.rbegin(); it != goals.rend(); ++it) {
        Item i;
        i.goal = rename_query(*it);
        i.depth = 1;
        cont = cons_item(std::move(i), cont);
      }
      if (loop(cont, 0)) {
        out.status = SolveStatus::Success;
        std::map<std::string, TermPtr> sol;
        for (const std::string& n : qvars)
          sol[n] = snapshot_term(store_, mk_var(n));
        out.first_solution = std::move(sol);
      }
    } catch (const Abort& a) {
      out.status = a.status;
      out.error = a.msg;
    }
    out.trace = std::move(trace_);
    out.steps_used = steps_;
    return out;
  }

 private:
  // One resolution loop with its own choicepoint stack. Negation runs a
  // nested loop over the shared store, boxes, and trace.
  bool loop(ContPtr cont, size_t entry_trail) {
    std::vector<CP> cps;
    size_t entry_boxes = boxes_.size();
    bool backtracking = false;
    for (;;) {
      if (!backtracking) {
        if (!cont) return true;
        Item item = cont->item;
        cont = cont->next;
        switch (item.kind) {
          case Item::K::Exit: {
            Box& bx = boxes_[item.box];
            emit(Port::Exit, item.box, bx.goal, std::nullopt, bx.depth);
            bx.state = Box::St::Exited;
            break;
          }
          case Item::K::Commit:
            if (cps.size() > item.cp_index) cps.resize(item.cp_index);
            {
              Item then;
              then.goal = item.goal;
              then.depth = item.depth;
              then.barrier = item.barrier;
              then.ebox = item.ebox;
              cont = cons_item(std::move(then), cont);
            }
            break;
          case Item::K::Goal:
            backtracking = !dispatch(item, cont, cps);
            break;
        }
      } else {
        if (cps.empty()) {
          sweep_boxes(entry_boxes);
          store_.undo_to(entry_trail);
          return false;
        }
        CP& cp = cps.back();
        sweep_boxes(cp.boxes_mark);
        store_.undo_to(cp.trail_mark);
        if (cp.kind == CP::K::Branch) {
          CP saved = std::move(cps.back());
          cps.pop_back();
          redo_chain(saved.owner);
          Item b;
          b.goal = saved.branch;
          b.depth = saved.branch_depth;
          b.barrier = saved.branch_barrier;
          b.ebox = saved.branch_ebox;
          cont = cons_item(std::move(b), saved.cont);
          backtracking = false;
        } else {
          backtracking = !resume_clauses(cp, cont, cps);
        }
      }
    }
  }

  bool resume_clauses(CP& cp, ContPtr& cont, std::vector<CP>& cps) {
    bump_step();
    // Snapshot the exited chain before head unification rebinds the goal.
    std::vector<int> chain;
    int w = cp.owner;
    while (w >= 0 && boxes_[w].state == Box::St::Exited) {
      chain.push_back(w);
      w = boxes_[w].parent;
    }
    std::vector<TermPtr> snaps(chain.size());
    if (opts_.trace)
      for (size_t i = 0; i < chain.size(); ++i)
        snaps[i] = snapshot_term(store_, boxes_[chain[i]].goal);
    const std::vector<int>& cand = *cp.candidates;
    size_t m = store_.mark();
    std::optional<size_t> found;
    std::vector<TermPtr> body;
    for (size_t i = cp.next_idx; i < cand.size(); ++i) {
      bump_step();
      auto [h, bd] = rename_clause(all_[cand[i]]);
      if (unify(store_, cp.goal, h)) {
        found = i;
        body = std::move(bd);
        break;
      }
      store_.undo_to(m);
    }
    Box& owner = boxes_[cp.owner];
    if (!found) {
      if (owner.state == Box::St::Exited)
        emit(Port::Redo, cp.owner, owner.goal, std::nullopt, owner.depth);
      emit(Port::Fail, cp.owner, owner.goal, std::nullopt, owner.depth);
      owner.state = Box::St::Dead;
      cps.pop_back();
      return false;
    }
    cp.next_idx = *found + 1;
    int gid = cand[*found];
    std::optional<int> cid;
    if (gid < user_count_) cid = gid;
    for (size_t i = chain.size(); i-- > 0;) {
      Box& bx = boxes_[chain[i]];
      emit_snap(Port::Redo, chain[i], snaps[i],
                chain[i] == cp.owner ? cid : bx.cid, bx.depth);
      bx.state = Box::St::Open;
    }
    owner.cid = cid;
    size_t barrier = cps.size() - 1;  // this choicepoint's own index
    Item exit;
    exit.kind = Item::K::Exit;
    exit.box = cp.owner;
    cont = cons_item(std::move(exit), cp.cont);
    for (auto it = body.rbegin(); it != body.rend(); ++it) {
      Item bi;
      bi.goal = *it;
      bi.depth = cp.depth + 1;
      bi.barrier = barrier;
      bi.ebox = cp.owner;
      cont = cons_item(std::move(bi), cont);
    }
    return true;
  }

  // Re-opens the contiguous run of exited boxes from `owner` upward, emitting
  // redo events outermost-first with each box's current clause.
  void redo_chain(int owner) {
    if (owner < 0) return;
    std::vector<int> chain;
    int b = owner;
    while (b >= 0 && boxes_[b].state == Box::St::Exited) {
      chain.push_back(b);
      b = boxes_[b].parent;
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      Box& bx = boxes_[*it];
      emit(Port::Redo, *it, bx.goal, bx.cid, bx.depth);
      bx.state = Box::St::Open;
    }
  }

  void sweep_boxes(size_t mark) {
    for (size_t i = boxes_.size(); i-- > mark;) {
      Box& bx = boxes_[i];
      if (bx.state == Box::St::Open)
        emit(Port::Fail, static_cast<int>(i), bx.goal, std::nullopt, bx.depth);
      bx.state = Box::St::Dead;
    }
    boxes_.resize(mark);
  }

  bool dispatch(const Item& item, ContPtr& cont, std::vector<CP>& cps) {
    bump_step();
    TermPtr g = store_.deref(item.goal);
    switch (g->kind) {
      case TermKind::Var:
      case TermKind::Anon:
        throw Abort{SolveStatus::RuntimeError,
                    "arguments are not sufficiently instantiated"};
      case TermKind::Cut:
        if (cps.size() > item.barrier) cps.resize(item.barrier);
        return true;
      case TermKind::Tuple:
        for (auto it = g->args.rbegin(); it != g->args.rend(); ++it) {
          Item e;
          e.goal = *it;
          e.depth = item.depth;
          e.barrier = item.barrier;
          e.ebox = item.ebox;
          cont = cons_item(std::move(e), cont);
        }
        return true;
      case TermKind::Atom:
      case TermKind::Compound:
        break;
      default:
        throw Abort{SolveStatus::RuntimeError,
                    "goal is not callable: " + pretty(snapshot_term(store_, g))};
    }
    const std::string& f = g->text;
    int n = static_cast<int>(g->args.size());
    if (f == "," && n == 2) {
      for (int i = 1; i >= 0; --i) {
        Item e;
        e.goal = g->args[i];
        e.depth = item.depth;
        e.barrier = item.barrier;
        e.ebox = item.ebox;
        cont = cons_item(std::move(e), cont);
      }
      return true;
    }
    if ((f == ";" || f == "->") && n == 2) {
      TermPtr lhs = store_.deref(g->args[0]);
      TermPtr else_goal =
          f == ";" ? g->args[1] : mk_atom("fail");
      bool ite = f == "->";
      TermPtr cond = g->args[0], then_goal = g->args[1];
      if (f == ";" && lhs->kind == TermKind::Compound && lhs->text == "->" &&
          lhs->args.size() == 2) {
        ite = true;
        cond = lhs->args[0];
        then_goal = lhs->args[1];
      }
      CP cp;
      cp.kind = CP::K::Branch;
      cp.owner = item.ebox;
      cp.trail_mark = store_.mark();
      cp.boxes_mark = boxes_.size();
      cp.cont = cont;
      cp.branch = else_goal;
      cp.branch_depth = item.depth;
      cp.branch_barrier = item.barrier;
      cp.branch_ebox = item.ebox;
      cps.push_back(std::move(cp));
      if (ite) {
        Item commit;
        commit.kind = Item::K::Commit;
        commit.goal = then_goal;
        commit.depth = item.depth;
        commit.barrier = item.barrier;
        commit.ebox = item.ebox;
        commit.cp_index = cps.size() - 1;
        cont = cons_item(std::move(commit), cont);
        Item c;
        c.goal = cond;
        c.depth = item.depth;
        c.barrier = cps.size();  // cuts in the condition stay local to it
        c.ebox = item.ebox;
        cont = cons_item(std::move(c), cont);
      } else {
        Item l;
        l.goal = g->args[0];
        l.depth = item.depth;
        l.barrier = item.barrier;
        l.ebox = item.ebox;
        cont = cons_item(std::move(l), cont);
      }
      return true;
    }
    if (f == "\\+" && n == 1) return dispatch_naf(g, item);
    if (f == "call" && n >= 1 && n <= 4) {
      TermPtr target = store_.deref(g->args[0]);
      std::vector<TermPtr> extras(g->args.begin() + 1, g->args.end());
      TermPtr goal2;
      switch (target->kind) {
        case TermKind::Atom:
          goal2 = extras.empty() ? target
                                 : mk_compound(target->text, std::move(extras));
          break;
        case TermKind::Compound: {
          std::vector<TermPtr> as = target->args;
          as.insert(as.end(), extras.begin(), extras.end());
          goal2 = mk_compound(target->text, std::move(as));
          break;
        }
        case TermKind::Var:
        case TermKind::Anon:
          throw Abort{SolveStatus::RuntimeError,
                      "arguments are not sufficiently instantiated"};
        case TermKind::Cut:
        case TermKind::Tuple:
          if (extras.empty()) {
            goal2 = target;
            break;
          }
          [[fallthrough]];
        default:
          throw Abort{SolveStatus::RuntimeError,
                      "call/" + std::to_string(n) + ": target not callable"};
      }
      Item e;
      e.goal = goal2;
      e.depth = item.depth;
      e.barrier = cps.size();  // cuts inside call/N stay local
      e.ebox = item.ebox;
      cont = cons_item(std::move(e), cont);
      return true;
    }
    PredKey key{f, n};
    if (native_builtins().count(key))
      return dispatch_native(key, g, item);
    auto it = index_.find(key);
    if (it == index_.end()) {
      if (!opts_.unknown_as_fail)
        throw Abort{SolveStatus::RuntimeError,
                    "unknown predicate: " + pred_key_str(key)};
      int b = new_box(g, item.depth, item.ebox);
      emit(Port::Call, b, g, std::nullopt, item.depth);
      emit(Port::Fail, b, g, std::nullopt, item.depth);
      boxes_[b].state = Box::St::Dead;
      return false;
    }
    return dispatch_user(it->second, g, item, cont, cps);
  }

  bool dispatch_naf(const TermPtr& g, const Item& item) {
    int b = new_box(g, item.depth, item.ebox);
    emit(Port::Call, b, g, std::nullopt, item.depth);
    size_t m = store_.mark();
    Item inner;
    inner.goal = g->args[0];
    inner.depth = item.depth + 1;
    inner.ebox = b;
    bool proved = loop(cons_item(std::move(inner), nullptr), m);
    Box& bx = boxes_[b];
    if (proved) {
      store_.undo_to(m);
      emit(Port::Fail, b, bx.goal, std::nullopt, bx.depth);
      bx.state = Box::St::Dead;
      return false;
    }
    emit(Port::Exit, b, bx.goal, std::nullopt, bx.depth);
    bx.state = Box::St::Exited;
    return true;
  }

  bool dispatch_native(const PredKey& key, const TermPtr& g, const Item& item) {
    int b = new_box(g, item.depth, item.ebox);
    emit(Port::Call, b, g, std::nullopt, item.depth);
    bool ok = run_native(key, g);
    Box& bx = boxes_[b];
    if (ok) {
      emit(Port::Exit, b, bx.goal, std::nullopt, bx.depth);
      bx.state = Box::St::Exited;
      return true;
    }
    emit(Port::Fail, b, bx.goal, std::nullopt, bx.depth);
    bx.state = Box::St::Dead;
    return false;
  }

  bool run_native(const PredKey& key, const TermPtr& g) {
    const std::string& f = key.name;
    if (f == "true") return true;
    if (f == "fail") return false;
    if (f == "=") {
      size_t m = store_.mark();
      if (unify(store_, g->args[0], g->args[1])) return true;
      store_.undo_to(m);
      return false;
    }
    if (f == "\\=") {
      size_t m = store_.mark();
      bool ok = unify(store_, g->args[0], g->args[1]);
      store_.undo_to(m);
      return !ok;
    }
    if (f == "==" || f == "\\==") {
      bool eq = term_equal_norm(snapshot_term(store_, g->args[0]),
                                snapshot_term(store_, g->args[1]));
      return f == "==" ? eq : !eq;
    }
    if (f == "is") {
      long long v = eval_arith_store(store_, g->args[1]);
      size_t m = store_.mark();
      if (unify(store_, g->args[0], mk_int(v))) return true;
      store_.undo_to(m);
      return false;
    }
    if (f == "msort") {
      TermPtr list = snapshot_term(store_, g->args[0]);
      std::vector<TermPtr> elems;
      TermPtr cur = list;
      for (;;) {
        ConsView v = cons_view(cur);
        if (v.kind == ConsKind::Nil) break;
        if (v.kind == ConsKind::NotList) {
          if (cur->kind == TermKind::Var || cur->kind == TermKind::Anon)
            throw Abort{SolveStatus::RuntimeError,
                        "arguments are not sufficiently instantiated"};
          throw Abort{SolveStatus::RuntimeError,
                      "msort/2: not a proper list: " + pretty(list)};
        }
        elems.push_back(v.head);
        cur = v.rest;
      }
      std::stable_sort(elems.begin(), elems.end(),
                       [](const TermPtr& a, const TermPtr& b) {
                         return term_compare(a, b) < 0;
                       });
      size_t m = store_.mark();
      if (unify(store_, g->args[1], mk_list(std::move(elems)))) return true;
      store_.undo_to(m);
      return false;
    }
    long long a = eval_arith_store(store_, g->args[0]);
    long long b = eval_arith_store(store_, g->args[1]);
    if (f == "=:=") return a == b;
    if (f == "=\\=") return a != b;
    if (f == "<") return a < b;
    if (f == ">") return a > b;
    if (f == "=<") return a <= b;
    if (f == ">=") return a >= b;
    throw Abort{SolveStatus::RuntimeError, "unknown builtin: " + pred_key_str(key)};
  }

  bool dispatch_user(const std::vector<int>& cand, const TermPtr& g,
                     const Item& item, ContPtr& cont, std::vector<CP>& cps) {
    int b = new_box(g, item.depth, item.ebox);
    TermPtr call_snap = opts_.trace ? snapshot_term(store_, g) : nullptr;
    size_t m = store_.mark();
    std::optional<size_t> found;
    std::vector<TermPtr> body;
    for (size_t i = 0; i < cand.size(); ++i) {
      bump_step();
      auto [h, bd] = rename_clause(all_[cand[i]]);
      if (unify(store_, g, h)) {
        found = i;
        body = std::move(bd);
        break;
      }
      store_.undo_to(m);
    }
    if (!found) {
      emit_snap(Port::Call, b, call_snap, std::nullopt, item.depth);
      emit(Port::Fail, b, g, std::nullopt, item.depth);
      boxes_[b].state = Box::St::Dead;
      return false;
    }
    int gid = cand[*found];
    std::optional<int> cid;
    if (gid < user_count_) cid = gid;
    boxes_[b].cid = cid;
    emit_snap(Port::Call, b, call_snap, cid, item.depth);
    size_t barrier;
    if (*found + 1 < cand.size()) {
      CP cp;
      cp.owner = b;
      cp.trail_mark = m;
      cp.boxes_mark = boxes_.size();
      cp.cont = cont;
      cp.goal = g;
      cp.candidates = &cand;
      cp.next_idx = *found + 1;
      cp.depth = item.depth;
      cps.push_back(std::move(cp));
      barrier = cps.size() - 1;
    } else {
      barrier = cps.size();
    }
    Item exit;
    exit.kind = Item::K::Exit;
    exit.box = b;
    cont = cons_item(std::move(exit), cont);
    for (auto it = body.rbegin(); it != body.rend(); ++it) {
      Item bi;
      bi.goal = *it;
      bi.depth = item.depth + 1;
      bi.barrier = barrier;
      bi.ebox = b;
      cont = cons_item(std::move(bi), cont);
    }
    return true;
  }

  int new_box(TermPtr g, int depth, int parent) {
    if (depth > opts_.limits.max_depth)
      throw Abort{SolveStatus::ResourceLimit, "depth limit exceeded"};
    Box b;
    b.goal = std::move(g);
    b.depth = depth;
    b.parent = parent;
    boxes_.push_back(std::move(b));
    return static_cast<int>(boxes_.size()) - 1;
  }

  void bump_step() {
    if (++steps_ > opts_.limits.max_steps)
      throw Abort{SolveStatus::ResourceLimit, "step limit exceeded"};
    if ((steps_ & 255) == 0) {
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - start_)
                    .count();
      if (ms > opts_.limits.wall_clock_ms)
        throw Abort{SolveStatus::ResourceLimit, "time limit exceeded"};
    }
  }

  void check_port(int box, Port p) {
    Box& bx = boxes_[box];
    bool ok = false;
    switch (p) {
      case Port::Call:
        ok = !bx.any_event;
        break;
      case Port::Exit:
      case Port::Fail:
        ok = bx.any_event && (bx.last == Port::Call || bx.last == Port::Redo);
        break;
      case Port::Redo:
        ok = bx.any_event && bx.last == Port::Exit;
        break;
    }
    if (!ok) throw std::logic_error("port discipline violation");
    bx.last = p;
    bx.any_event = true;
  }

  void emit(Port p, int box, const TermPtr& goal, std::optional<int> cid,
            int depth) {
    check_port(box, p);
    if (!opts_.trace) return;
    trace_.push_back(TraceEvent{seq_++, p, snapshot_term(store_, goal), cid,
                                depth});
  }

  // Variant taking a pre-computed snapshot (call events snapshot the goal
  // before head unification binds it).
  void emit_snap(Port p, int box, const TermPtr& snap, std::optional<int> cid,
                 int depth) {
    check_port(box, p);
    if (!opts_.trace) return;
    trace_.push_back(TraceEvent{seq_++, p, snap, cid, depth});
  }

  std::pair<TermPtr, std::vector<TermPtr>> rename_clause(const Clause& c) {
    long long gen = ++gen_;
    TermPtr h = rename_term(c.head, gen);
    std::vector<TermPtr> body;
    body.reserve(c.body.size());
    for (const TermPtr& g : c.body) body.push_back(rename_term(g, gen));
    return {std::move(h), std::move(body)};
  }

  TermPtr rename_term(const TermPtr& t, long long gen) {
    switch (t->kind) {
      case TermKind::Var:
        return mk_var(t->text + "`" + std::to_string(gen));
      case TermKind::Anon:
        return mk_var("_`" + std::to_string(gen) + "`" +
                      std::to_string(anon_++));
      default:
        break;
    }
    if (t->args.empty() && !t->tail) return t;
    std::vector<TermPtr> children = term_children(t);
    for (TermPtr& c : children) c = rename_term(c, gen);
    return with_children(t, std::move(children));
  }

  TermPtr rename_query(const TermPtr& t) {
    if (t->kind == TermKind::Anon)
      return mk_var("_`q`" + std::to_string(anon_++));
    if (t->args.empty() && !t->tail) return t;
    std::vector<TermPtr> children = term_children(t);
    for (TermPtr& c : children) c = rename_query(c);
    return with_children(t, std::move(children));
  }

  EngineOptions opts_;
  int user_count_;
  std::vector<Clause> all_;
  std::map<PredKey, std::vector<int>> index_;
  Store store_;
  std::vector<Box> boxes_;
  std::vector<TraceEvent> trace_;
  long long seq_ = 0;
  long long steps_ = 0;
  long long gen_ = 0;
  long long anon_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

QueryOutcome solve(const Program& p, const std::vector<TermPtr>& goals,
                   const EngineOptions& opts) {
  Machine m(p, opts);
  return m.run(goals);
}

std::optional<Bindings> unify_terms(const TermPtr& a, const TermPtr& b,
                                    const Bindings& base) {
  Store s;
  s.map.insert(base.map.begin(), base.map.end());
  if (!unify(s, a, b)) return std::nullopt;
  Bindings out;
  out.map.insert(s.map.begin(), s.map.end());
  out.generation = base.generation;
  return out;
}

TermPtr substitute(const TermPtr& t, const Bindings& b) {
  Store s;
  s.map.insert(b.map.begin(), b.map.end());
  try {
    return snapshot_term(s, t);
  } catch (const Abort& a) {
    throw std::runtime_error(a.msg);
  }
}

long long eval_arith(const TermPtr& t, const Bindings& b) {
  Store s;
  s.map.insert(b.map.begin(), b.map.end());
  try {
    return eval_arith_store(s, t);
  } catch (const Abort& a) {
    throw EvalError(a.msg);
  }
}

std::string dump_trace(const std::vector<TraceEvent>& trace, const Program& p) {
  std::string out;
  for (const TraceEvent& e : trace) {
    out += std::to_string(e.seq);
    out += '\t';
    out += port_name(e.port);
    out += '\t';
    out += std::to_string(e.depth);
    out += '\t';
    out += pretty(e.goal);
    out += '\t';
    if (e.clause_id)
      out += "#" + std::to_string(clause_index_in_pred(p, *e.clause_id));
    else
      out += "-";
    out += '\n';
  }
  return out;
}

}  // namespace prodbg
