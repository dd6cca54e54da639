#include "prodbg/corpus.hpp"

#include <climits>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include "prodbg/callgraph.hpp"
#include "prodbg/mutate.hpp"
#include "prodbg/parser.hpp"
#include "prodbg/pretty.hpp"

namespace prodbg {

namespace {

// Bounded draw on the raw generator keeps results identical across standard
// library implementations; the modulo bias is irrelevant at these sizes.
std::size_t draw(std::mt19937_64& rng, std::size_t n) {
  return n ? static_cast<std::size_t>(rng() % n) : 0;
}

const char* flip_comparison(const std::string& op) {
  if (op == "<") return ">=";
  if (op == ">") return "=<";
  if (op == "=<") return ">";
  if (op == ">=") return "<";
  if (op == "=:=") return "=\\=";
  if (op == "=\\=") return "=:=";
  if (op == "==") return "\\==";
  if (op == "\\==") return "==";
  if (op == "=") return "\\=";
  if (op == "\\=") return "=";
  return nullptr;
}

using Path = std::vector<int>;

template <typename Want>
void collect_sites(const TermPtr& t, const Want& want, Path& cur,
                   std::vector<Path>& out) {
  if (want(t)) out.push_back(cur);
  std::vector<TermPtr> kids = term_children(t);
  for (std::size_t i = 0; i < kids.size(); ++i) {
    cur.push_back(static_cast<int>(i));
    collect_sites(kids[i], want, cur, out);
    cur.pop_back();
  }
}

TermPtr rebuild_at(const TermPtr& t, const Path& path, std::size_t i,
                   const std::function<TermPtr(const TermPtr&)>& fn) {
  if (i == path.size()) return fn(t);
  std::vector<TermPtr> kids = term_children(t);
  kids[path[i]] = rebuild_at(kids[path[i]], path, i + 1, fn);
  return with_children(t, std::move(kids));
}

TermPtr swap_vars(const TermPtr& t, const std::string& a,
                  const std::string& b) {
  if (t->kind == TermKind::Var) {
    if (t->text == a) return mk_var(b);
    if (t->text == b) return mk_var(a);
    return t;
  }
  std::vector<TermPtr> kids = term_children(t);
  if (kids.empty()) return t;
  bool changed = false;
  for (TermPtr& k : kids) {
    TermPtr nk = swap_vars(k, a, b);
    if (nk != k) {
      k = nk;
      changed = true;
    }
  }
  return changed ? with_children(t, std::move(kids)) : t;
}

struct TermSite {
  int clause_idx = 0;
  int goal = -1;  // -1 addresses the head
  Path path;
};

const TermPtr& site_root(const Clause& c, const TermSite& s) {
  return s.goal < 0 ? c.head : c.body[s.goal];
}

Clause replace_site(const Clause& c, const TermSite& s,
                    const std::function<TermPtr(const TermPtr&)>& fn) {
  Clause nc = c;
  if (s.goal < 0)
    nc.head = rebuild_at(c.head, s.path, 0, fn);
  else
    nc.body[s.goal] = rebuild_at(c.body[s.goal], s.path, 0, fn);
  return nc;
}

bool edit_mutation(Program& cur, std::mt19937_64& rng,
                   std::vector<std::string>& recipe, std::set<int>& truth,
                   const InjectOptions& opts) {
  if (cur.clauses.empty()) return false;
  int cid = cur.clauses[draw(rng, cur.clauses.size())].id;
  EnumOptions eo;
  eo.budget = opts.mutant_pool;
  EnumResult res = mutants_for_clause(cur, cid, 1, MutMode::FL, 0, eo);
  if (res.mutants.empty()) return false;
  const Mutant& m = res.mutants[draw(rng, res.mutants.size())];
  std::ostringstream os;
  os << "mutation(clause " << cid << ": " << m.text << ")";
  cur = m.program;
  truth.insert(cid);
  recipe.push_back(os.str());
  return true;
}

bool edit_cmp_flip(Program& cur, std::mt19937_64& rng,
                   std::vector<std::string>& recipe, std::set<int>& truth) {
  std::vector<TermSite> sites;
  auto want = [](const TermPtr& t) {
    return t->kind == TermKind::Compound && t->args.size() == 2 &&
           flip_comparison(t->text) != nullptr;
  };
  for (std::size_t ci = 0; ci < cur.clauses.size(); ++ci)
    for (std::size_t g = 0; g < cur.clauses[ci].body.size(); ++g) {
      Path base;
      std::vector<Path> hits;
      collect_sites(cur.clauses[ci].body[g], want, base, hits);
      for (Path& p : hits)
        sites.push_back({static_cast<int>(ci), static_cast<int>(g),
                         std::move(p)});
    }
  if (sites.empty()) return false;
  const TermSite& s = sites[draw(rng, sites.size())];
  const Clause& c = cur.clauses[s.clause_idx];
  std::string from, to;
  auto fn = [&](const TermPtr& t) {
    from = t->text;
    to = flip_comparison(t->text);
    return mk_compound(to, t->args);
  };
  Clause nc = replace_site(c, s, fn);
  cur = replace_clause(cur, nc);
  truth.insert(c.id);
  std::ostringstream os;
  os << "cmp_flip(clause " << c.id << ", " << from << " -> " << to << ")";
  recipe.push_back(os.str());
  return true;
}

bool edit_off_by_one(Program& cur, std::mt19937_64& rng,
                     std::vector<std::string>& recipe, std::set<int>& truth) {
  std::vector<TermSite> sites;
  auto want = [](const TermPtr& t) { return t->kind == TermKind::Int; };
  for (std::size_t ci = 0; ci < cur.clauses.size(); ++ci) {
    const Clause& c = cur.clauses[ci];
    Path base;
    std::vector<Path> hits;
    collect_sites(c.head, want, base, hits);
    for (Path& p : hits)
      sites.push_back({static_cast<int>(ci), -1, std::move(p)});
    for (std::size_t g = 0; g < c.body.size(); ++g) {
      hits.clear();
      collect_sites(c.body[g], want, base, hits);
      for (Path& p : hits)
        sites.push_back({static_cast<int>(ci), static_cast<int>(g),
                         std::move(p)});
    }
  }
  if (sites.empty()) return false;
  const TermSite& s = sites[draw(rng, sites.size())];
  const Clause& c = cur.clauses[s.clause_idx];
  long long delta = draw(rng, 2) ? 1 : -1;
  long long before = 0, after = 0;
  auto fn = [&](const TermPtr& t) {
    before = t->value;
    if (before == LLONG_MAX && delta > 0) delta = -1;
    if (before == LLONG_MIN && delta < 0) delta = 1;
    after = before + delta;
    return mk_int(after);
  };
  Clause nc = replace_site(c, s, fn);
  cur = replace_clause(cur, nc);
  truth.insert(c.id);
  std::ostringstream os;
  os << "off_by_one(clause " << c.id << ", " << before << " -> " << after
     << ")";
  recipe.push_back(os.str());
  return true;
}

bool edit_var_swap(Program& cur, std::mt19937_64& rng,
                   std::vector<std::string>& recipe, std::set<int>& truth) {
  std::vector<std::pair<int, std::vector<std::string>>> options;
  for (std::size_t ci = 0; ci < cur.clauses.size(); ++ci) {
    const Clause& c = cur.clauses[ci];
    std::vector<std::string> vars;
    collect_vars(c.head, vars);
    for (const TermPtr& g : c.body) collect_vars(g, vars);
    if (vars.size() >= 2) options.emplace_back(static_cast<int>(ci), vars);
  }
  if (options.empty()) return false;
  const auto& [ci, vars] = options[draw(rng, options.size())];
  std::size_t i = draw(rng, vars.size());
  std::size_t j = draw(rng, vars.size() - 1);
  if (j >= i) ++j;
  const std::string& a = vars[i];
  const std::string& b = vars[j];
  Clause nc = cur.clauses[ci];
  nc.head = swap_vars(nc.head, a, b);
  for (TermPtr& g : nc.body) g = swap_vars(g, a, b);
  cur = replace_clause(cur, nc);
  truth.insert(nc.id);
  std::ostringstream os;
  os << "var_swap(clause " << nc.id << ", " << a << " <-> " << b << ")";
  recipe.push_back(os.str());
  return true;
}

bool edit_goal_drop(Program& cur, std::mt19937_64& rng,
                    std::vector<std::string>& recipe, std::set<int>& truth) {
  std::vector<int> options;
  for (std::size_t ci = 0; ci < cur.clauses.size(); ++ci)
    if (!cur.clauses[ci].body.empty()) options.push_back(static_cast<int>(ci));
  if (options.empty()) return false;
  int ci = options[draw(rng, options.size())];
  Clause nc = cur.clauses[ci];
  std::size_t g = draw(rng, nc.body.size());
  nc.body.erase(nc.body.begin() + g);
  cur = replace_clause(cur, nc);
  truth.insert(nc.id);
  std::ostringstream os;
  os << "goal_drop(clause " << nc.id << ", goal " << g << ")";
  recipe.push_back(os.str());
  return true;
}

bool edit_arg_abstract(Program& cur, std::mt19937_64& rng,
                       std::vector<std::string>& recipe,
                       std::set<int>& truth) {
  std::vector<std::pair<int, int>> sites;  // clause index, head arg position
  for (std::size_t ci = 0; ci < cur.clauses.size(); ++ci) {
    const TermPtr& h = cur.clauses[ci].head;
    if (h->kind != TermKind::Compound) continue;
    for (std::size_t a = 0; a < h->args.size(); ++a)
      if (h->args[a]->kind != TermKind::Anon)
        sites.emplace_back(static_cast<int>(ci), static_cast<int>(a));
  }
  if (sites.empty()) return false;
  auto [ci, pos] = sites[draw(rng, sites.size())];
  Clause nc = cur.clauses[ci];
  std::vector<TermPtr> args = nc.head->args;
  args[pos] = mk_anon();
  nc.head = mk_compound(nc.head->text, std::move(args));
  cur = replace_clause(cur, nc);
  truth.insert(nc.id);
  std::ostringstream os;
  os << "arg_abstract(clause " << nc.id << ", arg " << pos << ")";
  recipe.push_back(os.str());
  return true;
}

bool apply_one_edit(Program& cur, std::mt19937_64& rng,
                    std::vector<std::string>& recipe, std::set<int>& truth,
                    const InjectOptions& opts) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    switch (draw(rng, 6)) {
      case 0:
        if (edit_mutation(cur, rng, recipe, truth, opts)) return true;
        break;
      case 1:
        if (edit_cmp_flip(cur, rng, recipe, truth)) return true;
        break;
      case 2:
        if (edit_off_by_one(cur, rng, recipe, truth)) return true;
        break;
      case 3:
        if (edit_var_swap(cur, rng, recipe, truth)) return true;
        break;
      case 4:
        if (edit_goal_drop(cur, rng, recipe, truth)) return true;
        break;
      default:
        if (edit_arg_abstract(cur, rng, recipe, truth)) return true;
        break;
    }
  }
  return false;
}

bool clause_same(const Clause& a, const Clause& b) {
  if (!term_equal(a.head, b.head)) return false;
  if (a.body.size() != b.body.size()) return false;
  for (std::size_t i = 0; i < a.body.size(); ++i)
    if (!term_equal(a.body[i], b.body[i])) return false;
  return true;
}

}  // namespace

BuggyInstance inject_bugs(const Program& correct,
                          const std::vector<TestCase>& suite, int n_bugs,
                          std::uint64_t seed, const InjectOptions& opts) {
  if (n_bugs < 1)
    throw std::invalid_argument("inject_bugs: n_bugs must be at least 1");
  if (correct.clauses.empty())
    throw std::invalid_argument("inject_bugs: program has no clauses");
  std::mt19937_64 rng(seed);
  RunSuiteOptions ro;
  ro.limits = opts.limits;
  ro.unknown_as_fail = opts.unknown_as_fail;
  ro.jobs = opts.jobs;
  for (int retry = 0; retry < opts.max_retries; ++retry) {
    Program cur = correct;
    std::vector<std::string> parts;
    std::set<int> truth;
    bool ok = true;
    for (int b = 0; b < n_bugs && ok; ++b)
      ok = apply_one_edit(cur, rng, parts, truth, opts);
    if (!ok) continue;
    try {
      (void)parse_program(pretty_program(cur));
    } catch (...) {
      continue;
    }
    SuiteResult r = run_suite(cur, suite, ro);
    if (r.passed == static_cast<int>(suite.size())) continue;
    BuggyInstance inst;
    inst.buggy = std::move(cur);
    inst.fixed = correct;
    inst.ground_truth = std::move(truth);
    inst.suite = suite;
    std::string recipe;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) recipe += "; ";
      recipe += parts[i];
    }
    inst.recipe = std::move(recipe);
    inst.seed = seed;
    return inst;
  }
  throw std::runtime_error(
      "inject_bugs: retry budget exhausted without a failing variant");
}

std::set<int> ground_truth(const Program& buggy, const Program& fixed,
                           const std::vector<TestCase>& newly_passed) {
  std::set<int> modified;
  for (const auto& [key, ids] : buggy.predicate_index) {
    auto it = fixed.predicate_index.find(key);
    for (std::size_t ord = 0; ord < ids.size(); ++ord) {
      if (it == fixed.predicate_index.end() || ord >= it->second.size()) {
        modified.insert(ids[ord]);
        continue;
      }
      const Clause& bc = buggy.clauses[ids[ord]];
      const Clause& fc = fixed.clauses[it->second[ord]];
      if (!clause_same(bc, fc)) modified.insert(ids[ord]);
    }
  }
  std::set<PredKey> seeds;
  for (const TestCase& t : newly_passed)
    for (const TermPtr& goal : t.goal) {
      std::set<PredKey> ps = goal_predicates(goal);
      seeds.insert(ps.begin(), ps.end());
    }
  std::set<PredKey> relevant =
      transitive_closure(predicate_call_graph(buggy), seeds);
  std::set<int> out;
  for (int id : modified)
    if (relevant.count(clause_pred(buggy.clauses[id]))) out.insert(id);
  return out;
}

FLQuality fl_quality(const std::vector<RankedClause>& ranking,
                     const std::set<int>& truth, const std::vector<int>& ks,
                     const QualityOptions& opts) {
  if (truth.empty())
    throw std::invalid_argument("fl_quality: ground truth is empty");
  std::set<int> ranked;
  int min_rank = 0;
  for (const RankedClause& rc : ranking) {
    ranked.insert(rc.clause_id);
    if (truth.count(rc.clause_id) && (min_rank == 0 || rc.rank < min_rank))
      min_rank = rc.rank;
  }
  for (int t : truth)
    if (!ranked.count(t))
      throw std::invalid_argument(
          "fl_quality: ground-truth clause missing from ranking");
  FLQuality q;
  q.min_rank = min_rank;
  for (int k : ks) {
    int hits = 0;
    for (const RankedClause& rc : ranking)
      if (rc.rank <= k && truth.count(rc.clause_id)) ++hits;
    q.acc_at_k[k] = opts.at_least_one
                        ? (hits > 0 ? 1.0 : 0.0)
                        : static_cast<double>(hits) /
                              static_cast<double>(truth.size());
  }
  q.expense = 100.0 * min_rank / static_cast<double>(ranking.size());
  return q;
}

std::string manifest_line(const BuggyInstance& inst,
                          const std::string& buggy_path,
                          const std::string& fixed_path,
                          const std::string& suite_path) {
  nlohmann::ordered_json j;
  j["buggy"] = buggy_path;
  j["fixed"] = fixed_path;
  j["suite"] = suite_path;
  j["ground_truth"] =
      std::vector<int>(inst.ground_truth.begin(), inst.ground_truth.end());
  j["seed"] = inst.seed;
  j["recipe"] = inst.recipe;
  return j.dump() + "\n";
}

std::string quality_report_json(const std::vector<FLQuality>& per_instance,
                                int timeout_count) {
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const FLQuality& q : per_instance) {
    nlohmann::ordered_json acc = nlohmann::ordered_json::object();
    for (const auto& [k, v] : q.acc_at_k) acc[std::to_string(k)] = v;
    per.push_back({{"min_rank", q.min_rank},
                   {"acc_at_k", acc},
                   {"expense", q.expense}});
  }
  auto mean_acc = [&](int k) {
    double sum = 0.0;
    int n = 0;
    for (const FLQuality& q : per_instance) {
      auto it = q.acc_at_k.find(k);
      if (it != q.acc_at_k.end()) {
        sum += it->second;
        ++n;
      }
    }
    return n ? sum / n : 0.0;
  };
  double mr = 0.0, ex = 0.0;
  for (const FLQuality& q : per_instance) {
    mr += q.min_rank;
    ex += q.expense;
  }
  std::size_t n = per_instance.size();
  int total = static_cast<int>(n) + timeout_count;
  nlohmann::ordered_json agg;
  agg["min_rank_mean"] = n ? mr / static_cast<double>(n) : 0.0;
  agg["acc@1"] = mean_acc(1);
  agg["acc@3"] = mean_acc(3);
  agg["acc@5"] = mean_acc(5);
  agg["acc@10"] = mean_acc(10);
  agg["expense_mean"] = n ? ex / static_cast<double>(n) : 0.0;
  agg["timeout_pct"] =
      total ? 100.0 * timeout_count / static_cast<double>(total) : 0.0;
  nlohmann::ordered_json j;
  j["per_instance"] = per;
  j["aggregate"] = agg;
  return j.dump(2) + "\n";
}

}  // namespace prodbg
