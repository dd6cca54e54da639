#include "prodbg/pretty.hpp"

#include <cctype>

#include "prodbg/ops.hpp"

namespace prodbg {
namespace {

bool plain_ident(const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0])))
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

bool symbolic_run(const std::string& s) {
  static const std::string set = "#$&*+-./:<=>?@^~\\";
  if (s.empty()) return false;
  for (char c : s)
    if (set.find(c) == std::string::npos) return false;
  return s != ".";  // a bare '.' would read as the end token
}

std::string atom_text(const std::string& name) {
  if (plain_ident(name) || symbolic_run(name) || name == ";" || name == "!")
    return name;
  std::string out = "'";
  for (char c : name) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += "'";
  return out;
}

void render(const TermPtr& t, int max_prec, std::string& out);

void render_joined(const std::vector<TermPtr>& ts, std::string& out) {
  for (size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ", ";
    render(ts[i], 999, out);
  }
}

void render_op(const TermPtr& t, const OpDef& op, int max_prec,
               std::string& out) {
  bool parens = op.prec > max_prec;
  if (parens) out += '(';
  if (t->args.size() == 2) {
    int lmax = op.type == OpType::YFX ? op.prec : op.prec - 1;
    int rmax = op.type == OpType::XFY ? op.prec : op.prec - 1;
    render(t->args[0], lmax, out);
    out += ' ';
    out += t->text;
    out += ' ';
    render(t->args[1], rmax, out);
  } else {
    out += t->text;
    out += ' ';
    render(t->args[0], op.type == OpType::FY ? op.prec : op.prec - 1, out);
  }
  if (parens) out += ')';
}

void render(const TermPtr& t, int max_prec, std::string& out) {
  switch (t->kind) {
    case TermKind::Atom:
      out += atom_text(t->text);
      return;
    case TermKind::Int:
      out += std::to_string(t->value);
      return;
    case TermKind::Var:
      out += t->text;
      return;
    case TermKind::Anon:
      out += '_';
      return;
    case TermKind::Cut:
      out += '!';
      return;
    case TermKind::Hole:
      out += '?';
      return;
    case TermKind::Compound: {
      if (t->args.size() == 2) {
        if (const OpDef* op = infix_op(t->text)) {
          render_op(t, *op, max_prec, out);
          return;
        }
      }
      if (t->args.size() == 1) {
        if (const OpDef* op = prefix_op(t->text)) {
          // "- 3" would read back as the integer -3, so a prefix minus over
          // an integer falls through to functional notation.
          if (!(t->text == "-" && t->args[0]->kind == TermKind::Int)) {
            render_op(t, *op, max_prec, out);
            return;
          }
        }
      }
      out += atom_text(t->text);
      out += '(';
      render_joined(t->args, out);
      out += ')';
      return;
    }
    case TermKind::List:
      out += '[';
      render_joined(t->args, out);
      out += ']';
      return;
    case TermKind::ListTail:
      out += '[';
      render_joined(t->args, out);
      out += '|';
      render(t->tail, 999, out);
      out += ']';
      return;
    case TermKind::Tuple:
      out += '(';
      render_joined(t->args, out);
      out += ')';
      return;
    case TermKind::Curly:
      out += '{';
      render_joined(t->args, out);
      out += '}';
      return;
  }
}

}  // namespace

std::string pretty(const TermPtr& t) {
  std::string out;
  render(t, 1200, out);
  return out;
}

std::string pretty_goals(const std::vector<TermPtr>& goals) {
  std::string out;
  render_joined(goals, out);
  return out;
}

std::string pretty_clause(const Clause& c) {
  std::string out;
  render(c.head, 1199, out);
  if (!c.body.empty()) {
    out += " :- ";
    render_joined(c.body, out);
  }
  out += '.';
  return out;
}

std::string pretty_program(const Program& p) {
  std::string out;
  for (const TermPtr& d : p.directives) {
    out += ":- ";
    render(d, 999, out);
    out += ".\n";
  }
  for (const Clause& c : p.clauses) {
    out += pretty_clause(c);
    out += '\n';
  }
  return out;
}

}  // namespace prodbg
