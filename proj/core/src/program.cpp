#include "prodbg/program.hpp"

#include <stdexcept>

namespace prodbg {

std::string pred_key_str(const PredKey& k) {
  return k.name + "/" + std::to_string(k.arity);
}

PredKey clause_pred(const Clause& c) {
  if (c.head->kind == TermKind::Compound)
    return {c.head->text, static_cast<int>(c.head->args.size())};
  return {c.head->text, 0};
}

Program make_program(std::vector<Clause> clauses,
                     std::vector<TermPtr> directives) {
  Program p;
  p.clauses = std::move(clauses);
  p.directives = std::move(directives);
  for (size_t i = 0; i < p.clauses.size(); ++i) {
    p.clauses[i].id = static_cast<int>(i);
    p.predicate_index[clause_pred(p.clauses[i])].push_back(
        static_cast<int>(i));
  }
  return p;
}

Program replace_clause(const Program& p, const Clause& c) {
  if (c.id < 0 || c.id >= static_cast<int>(p.clauses.size()))
    throw std::out_of_range("replace_clause: bad clause id");
  std::vector<Clause> clauses = p.clauses;
  clauses[c.id] = c;
  clauses[c.id].id = c.id;
  return make_program(std::move(clauses), p.directives);
}

bool program_equal(const Program& a, const Program& b) {
  if (a.clauses.size() != b.clauses.size()) return false;
  if (a.directives.size() != b.directives.size()) return false;
  for (size_t i = 0; i < a.clauses.size(); ++i) {
    const Clause& x = a.clauses[i];
    const Clause& y = b.clauses[i];
    if (!term_equal(x.head, y.head)) return false;
    if (x.body.size() != y.body.size()) return false;
    for (size_t j = 0; j < x.body.size(); ++j)
      if (!term_equal(x.body[j], y.body[j])) return false;
  }
  for (size_t i = 0; i < a.directives.size(); ++i)
    if (!term_equal(a.directives[i], b.directives[i])) return false;
  return true;
}

int clause_index_in_pred(const Program& p, int clause_id) {
  const auto& ids = p.predicate_index.at(clause_pred(p.clauses[clause_id]));
  for (size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == clause_id) return static_cast<int>(i);
  return -1;
}

}  // namespace prodbg
