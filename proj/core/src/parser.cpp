#include "prodbg/parser.hpp"

#include <cctype>
#include <optional>

#include "prodbg/ops.hpp"

namespace prodbg {
namespace {

enum class TokKind {
  Atom,     // unquoted name, symbolic run, quoted atom, ';'
  Var,      // starts with uppercase or '_'
  Int,
  Punct,    // ( ) [ ] { } , |
  End,      // clause-terminating '.'
  Eof,
};

struct Token {
  TokKind kind;
  std::string text;
  long long value = 0;
  int line = 1;
  int col = 1;
  bool fun_paren = false;  // '(' immediately follows, with no layout between
  bool quoted = false;
};

bool symbol_char(char c) {
  static const std::string set = "#$&*+-./:<=>?@^~\\";
  return set.find(c) != std::string::npos;
}

bool alnum_(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : src_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_layout();
      Token t = next_token();
      bool end = t.kind == TokKind::Eof;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(line_, col_, msg);
  }
  [[noreturn]] void unsupported(const std::string& what) {
    throw UnsupportedError(line_, col_, what);
  }

  bool eof() const { return pos_ >= src_.size(); }
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_layout() {
    for (;;) {
      if (eof()) return;
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '%') {
        while (!eof() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        int l = line_, co = col_;
        advance();
        advance();
        for (;;) {
          if (eof()) throw ParseError(l, co, "unterminated block comment");
          if (peek() == '*' && peek(1) == '/') {
            advance();
            advance();
            break;
          }
          advance();
        }
      } else {
        return;
      }
    }
  }

  Token make(TokKind kind, std::string text, int line, int col) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = line;
    t.col = col;
    t.fun_paren = !eof() && peek() == '(';
    return t;
  }

  Token next_token() {
    int line = line_, col = col_;
    if (eof()) return make(TokKind::Eof, "", line, col);
    char c = peek();

    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number();
    if (std::islower(static_cast<unsigned char>(c))) {
      std::string name;
      while (!eof() && alnum_(peek())) name += advance();
      return make(TokKind::Atom, name, line, col);
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      std::string name;
      while (!eof() && alnum_(peek())) name += advance();
      return make(TokKind::Var, name, line, col);
    }
    switch (c) {
      case '(':
      case ')':
      case '[':
      case ']':
      case '{':
      case '}':
      case ',':
      case '|':
        advance();
        return make(TokKind::Punct, std::string(1, c), line, col);
      case ';':
      case '!':
        advance();
        return make(TokKind::Atom, std::string(1, c), line, col);
      case '\'':
        return lex_quoted_atom();
      case '"':
        unsupported("string literal");
      default:
        break;
    }
    if (symbol_char(c)) {
      std::string run;
      while (!eof() && symbol_char(peek())) run += advance();
      if (run == ".") {
        char after = peek();
        if (eof() || after == ' ' || after == '\t' || after == '\r' ||
            after == '\n' || after == '%') {
          return make(TokKind::End, ".", line, col);
        }
        throw ParseError(line, col, "unexpected '.'");
      }
      return make(TokKind::Atom, run, line, col);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Token lex_number() {
    int line = line_, col = col_;
    std::string digits;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek())))
      digits += advance();
    if (!eof() && peek() == '\'' && digits == "0") {
      throw UnsupportedError(line, col, "character code literal");
    }
    if (!eof() && peek() == '.' &&
        std::isdigit(static_cast<unsigned char>(peek(1)))) {
      throw UnsupportedError(line, col, "floating point literal");
    }
    if (!eof() && alnum_(peek())) fail("malformed number");
    long long v = 0;
    try {
      v = std::stoll(digits);
    } catch (const std::out_of_range&) {
      throw ParseError(line, col, "integer literal out of range");
    }
    Token t = make(TokKind::Int, digits, line, col);
    t.value = v;
    return t;
  }

  Token lex_quoted_atom() {
    int line = line_, col = col_;
    advance();  // opening quote
    std::string name;
    for (;;) {
      if (eof()) throw ParseError(line, col, "unterminated quoted atom");
      char c = advance();
      if (c == '\'') {
        if (!eof() && peek() == '\'') {  // '' escapes a quote
          name += advance();
          continue;
        }
        break;
      }
      if (c == '\\') {
        if (eof()) throw ParseError(line, col, "unterminated quoted atom");
        char e = advance();
        switch (e) {
          case 'n': name += '\n'; break;
          case 't': name += '\t'; break;
          case '\\': name += '\\'; break;
          case '\'': name += '\''; break;
          case '"': name += '"'; break;
          default:
            fail(std::string("unknown escape '\\") + e + "'");
        }
        continue;
      }
      name += c;
    }
    Token t = make(TokKind::Atom, name, line, col);
    t.quoted = true;
    return t;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct Parsed {
  TermPtr term;
  int prec;  // priority of the outermost operator, 0 for primaries
};

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(Lexer(text).run()) {}

  Program program() {
    std::vector<Clause> clauses;
    std::vector<TermPtr> directives;
    while (peek().kind != TokKind::Eof) {
      const Token& first = peek();
      SourceSpan span{first.line, first.col, first.line, first.col};
      TermPtr t = term_upto_end();
      const Token& end = peek();
      span.line_end = end.line;
      span.col_end = end.col + 1;
      expect_end();
      if (t->kind == TermKind::Compound && t->text == ":-" &&
          t->args.size() == 1) {
        directives.push_back(t->args[0]);
        continue;
      }
      TermPtr head;
      std::vector<TermPtr> body;
      if (t->kind == TermKind::Compound && t->text == ":-" &&
          t->args.size() == 2) {
        head = t->args[0];
        body = flatten_body(t->args[1]);
      } else {
        head = t;
      }
      check_head(head, span);
      for (const TermPtr& g : body) check_goal(g, span);
      Clause c;
      c.head = head;
      c.body = std::move(body);
      c.span = span;
      clauses.push_back(std::move(c));
    }
    return make_program(std::move(clauses), std::move(directives));
  }

  std::vector<TermPtr> query() {
    if (peek().kind == TokKind::Atom && peek().text == "?-" &&
        !peek().fun_paren) {
      next();
    }
    const Token& first = peek();
    SourceSpan span{first.line, first.col, first.line, first.col};
    TermPtr t = term_upto_end();
    expect_end();
    if (peek().kind != TokKind::Eof)
      throw ParseError(peek().line, peek().col, "expected end of input");
    if (t->kind == TermKind::Compound && t->text == ":-")
      throw ParseError(span.line_begin, span.col_begin, "query must be a goal");
    std::vector<TermPtr> goals = flatten_body(t);
    for (const TermPtr& g : goals) check_goal(g, span);
    return goals;
  }

  TermPtr single_term() {
    TermPtr t = term_upto_end();
    expect_end();
    if (peek().kind != TokKind::Eof)
      throw ParseError(peek().line, peek().col, "expected end of input");
    return t;
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    if (i >= toks_.size()) i = toks_.size() - 1;
    return toks_[i];
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail_at(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.col, msg);
  }

  void expect_end() {
    if (peek().kind != TokKind::End)
      fail_at(peek(), "expected '.' at end of clause");
    next();
  }

  void expect_punct(const std::string& p) {
    if (peek().kind != TokKind::Punct || peek().text != p)
      fail_at(peek(), "expected '" + p + "'");
    next();
  }

  TermPtr term_upto_end() { return parse(1200).term; }

  static std::vector<TermPtr> flatten_body(const TermPtr& t) {
    if (t->kind == TermKind::Tuple) return t->args;
    return {t};
  }

  void check_head(const TermPtr& h, const SourceSpan& span) {
    if (h->kind != TermKind::Atom && h->kind != TermKind::Compound)
      throw ParseError(span.line_begin, span.col_begin, "invalid clause head");
  }

  void check_goal(const TermPtr& g, const SourceSpan& span) {
    if (!is_callable(g))
      throw ParseError(span.line_begin, span.col_begin, "goal is not callable");
  }

  bool starts_term(const Token& t) const {
    switch (t.kind) {
      case TokKind::Int:
      case TokKind::Var:
      case TokKind::Atom:
        return true;
      case TokKind::Punct:
        return t.text == "(" || t.text == "[" || t.text == "{";
      default:
        return false;
    }
  }

  Parsed parse(int max_prec) {
    Parsed left = primary(max_prec);
    for (;;) {
      const Token& t = peek();
      if (t.kind == TokKind::Punct && t.text == ",") {
        if (max_prec < 1000) break;
        std::vector<TermPtr> elems{left.term};
        while (peek().kind == TokKind::Punct && peek().text == ",") {
          next();
          elems.push_back(parse(999).term);
        }
        left = {mk_tuple(std::move(elems)), 1000};
        continue;
      }
      if (t.kind != TokKind::Atom || t.quoted) break;
      const OpDef* op = infix_op(t.text);
      if (!op || op->prec > max_prec) break;
      int left_max = op->type == OpType::YFX ? op->prec : op->prec - 1;
      int right_max = op->type == OpType::XFY ? op->prec : op->prec - 1;
      if (left.prec > left_max) break;
      next();
      TermPtr rhs = parse(right_max).term;
      left = {mk_compound(t.text, {left.term, rhs}), op->prec};
    }
    return left;
  }

  Parsed primary(int max_prec) {
    const Token& t = peek();
    switch (t.kind) {
      case TokKind::Int:
        next();
        return {mk_int(t.value), 0};
      case TokKind::Var:
        next();
        if (t.text == "_") return {mk_anon(), 0};
        return {mk_var(t.text), 0};
      case TokKind::Atom:
        return atom_primary(max_prec);
      case TokKind::Punct:
        if (t.text == "(") {
          next();
          TermPtr inner = parse(1200).term;
          expect_punct(")");
          return {inner, 0};
        }
        if (t.text == "[") return {list_primary(), 0};
        if (t.text == "{") return {curly_primary(), 0};
        fail_at(t, "unexpected '" + t.text + "'");
      case TokKind::End:
        fail_at(t, "unexpected '.'");
      case TokKind::Eof:
        fail_at(t, "unexpected end of input");
    }
    fail_at(t, "unexpected token");
  }

  Parsed atom_primary(int max_prec) {
    Token t = next();
    if (t.fun_paren) {
      next();  // '('
      std::vector<TermPtr> args;
      args.push_back(parse(999).term);
      while (peek().kind == TokKind::Punct && peek().text == ",") {
        next();
        args.push_back(parse(999).term);
      }
      expect_punct(")");
      return {mk_compound(t.text, std::move(args)), 0};
    }
    if (t.text == "!") return {mk_cut(), 0};
    if (t.text == "[]" ) return {mk_list({}), 0};
    if (!t.quoted) {
      const OpDef* op = prefix_op(t.text);
      if (op && op->prec <= max_prec && starts_term(peek()) &&
          !stops_operand(peek())) {
        if (t.text == "-" && peek().kind == TokKind::Int) {
          Token n = next();
          return {mk_int(-n.value), 0};
        }
        int arg_max = op->type == OpType::FY ? op->prec : op->prec - 1;
        TermPtr arg = parse(arg_max).term;
        return {mk_compound(t.text, {arg}), op->prec};
      }
    }
    return {mk_atom(t.text), 0};
  }

  // An atom that could be a prefix operator is read as a plain atom when the
  // following token is itself an infix operator ("X = -" and the like).
  bool stops_operand(const Token& t) const {
    if (t.kind != TokKind::Atom || t.quoted) return false;
    const OpDef* in = infix_op(t.text);
    if (!in) return false;
    if (prefix_op(t.text) && starts_term(peek(1))) return false;
    return true;
  }

  TermPtr list_primary() {
    expect_punct("[");
    if (peek().kind == TokKind::Punct && peek().text == "]") {
      next();
      return mk_list({});
    }
    std::vector<TermPtr> elems;
    elems.push_back(parse(999).term);
    while (peek().kind == TokKind::Punct && peek().text == ",") {
      next();
      elems.push_back(parse(999).term);
    }
    if (peek().kind == TokKind::Punct && peek().text == "|") {
      next();
      TermPtr tail = parse(999).term;
      expect_punct("]");
      return mk_list_tail(std::move(elems), std::move(tail));
    }
    expect_punct("]");
    return mk_list(std::move(elems));
  }

  TermPtr curly_primary() {
    expect_punct("{");
    if (peek().kind == TokKind::Punct && peek().text == "}") {
      next();
      return mk_curly({});
    }
    TermPtr inner = parse(1200).term;
    expect_punct("}");
    if (inner->kind == TermKind::Tuple) return mk_curly(inner->args);
    return mk_curly({inner});
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

}  // namespace

Program parse_program(const std::string& text) {
  return Parser(text).program();
}

std::vector<TermPtr> parse_query(const std::string& text) {
  return Parser(text).query();
}

TermPtr parse_term_text(const std::string& text) {
  return Parser(text).single_term();
}

}  // namespace prodbg
