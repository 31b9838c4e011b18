#include <cctype>
#include <cstdlib>

#include "nulldb/ast.hpp"

namespace nulldb {

namespace {

enum class Tok {
  End,
  Ident,   // keywords resolved by the parser
  Number,
  Attr,    // $k
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Star,    // * or U+00D7
  Plus,    // + or U+222A
  Minus,
  Slash,
  Backslash,
  Lt,
  Gt,
  Le,
  Ge,
  EqTok,
  Ne,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  int attr = 0;
  std::size_t pos = 0;
};

struct Lexer {
  const std::string& src;
  std::size_t at = 0;

  [[noreturn]] void err(std::size_t pos, const std::string& msg) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos && i < src.size(); ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrKind::Parse, msg + " at line " + std::to_string(line) + ", column " + std::to_string(col));
  }

  bool starts(const char* s) const {
    std::size_t n = std::char_traits<char>::length(s);
    return src.compare(at, n, s) == 0;
  }

  Token next() {
    while (at < src.size() && std::isspace(static_cast<unsigned char>(src[at]))) ++at;
    Token t;
    t.pos = at;
    if (at >= src.size()) return t;
    const char c = src[at];
    auto one = [&](Tok k) {
      t.kind = k;
      ++at;
      return t;
    };
    switch (c) {
      case '(': return one(Tok::LParen);
      case ')': return one(Tok::RParen);
      case '[': return one(Tok::LBracket);
      case ']': return one(Tok::RBracket);
      case '{': return one(Tok::LBrace);
      case '}': return one(Tok::RBrace);
      case ',': return one(Tok::Comma);
      case ';': return one(Tok::Semi);
      case '*': return one(Tok::Star);
      case '+': return one(Tok::Plus);
      case '-': return one(Tok::Minus);
      case '/': return one(Tok::Slash);
      case '\\': return one(Tok::Backslash);
      case '=': return one(Tok::EqTok);
      case '<':
        if (at + 1 < src.size() && src[at + 1] == '=') {
          at += 2;
          t.kind = Tok::Le;
          return t;
        }
        return one(Tok::Lt);
      case '>':
        if (at + 1 < src.size() && src[at + 1] == '=') {
          at += 2;
          t.kind = Tok::Ge;
          return t;
        }
        return one(Tok::Gt);
      case '!':
        if (at + 1 < src.size() && src[at + 1] == '=') {
          at += 2;
          t.kind = Tok::Ne;
          return t;
        }
        err(at, "stray '!'");
      case '$': {
        std::size_t p = at + 1;
        if (p >= src.size() || !std::isdigit(static_cast<unsigned char>(src[p])))
          err(at, "expected a digit after '$'");
        int v = 0;
        while (p < src.size() && std::isdigit(static_cast<unsigned char>(src[p]))) {
          v = v * 10 + (src[p] - '0');
          ++p;
        }
        if (v < 1) err(at, "attribute positions start at $1");
        t.kind = Tok::Attr;
        t.attr = v;
        at = p;
        return t;
      }
      default:
        break;
    }
    // UTF-8 operator aliases
    if (starts("\xc3\x97")) { // multiplication sign
      at += 2;
      t.kind = Tok::Star;
      return t;
    }
    if (starts("\xe2\x88\xaa")) { // union sign
      at += 3;
      t.kind = Tok::Plus;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && at + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[at + 1])))) {
      const char* begin = src.c_str() + at;
      char* end = nullptr;
      t.number = std::strtod(begin, &end);
      if (end == begin) err(at, "bad number");
      t.kind = Tok::Number;
      t.text = std::string(begin, static_cast<std::size_t>(end - begin));
      at += static_cast<std::size_t>(end - begin);
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t p = at;
      while (p < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[p])) || src[p] == '_'))
        ++p;
      t.kind = Tok::Ident;
      t.text = src.substr(at, p - at);
      at = p;
      return t;
    }
    err(at, "unexpected character");
  }
};

bool ident_is_null(const std::string& s, NullId& out) {
  if (s.size() < 2 || s[0] != 'n') return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  out = static_cast<NullId>(std::strtoul(s.c_str() + 1, nullptr, 10));
  return true;
}

const char* kKeywords[] = {"select", "project", "apply", "sum",     "count", "avg", "min",
                           "max",    "dedup",   "bag",   "isconst", "in",    "and", "or",
                           "not",    "inf"};

bool is_keyword(const std::string& s) {
  for (const char* k : kKeywords)
    if (s == k) return true;
  return false;
}

struct Parser {
  Lexer lex;
  Token cur;

  explicit Parser(const std::string& src) : lex{src} { cur = lex.next(); }

  struct Mark {
    std::size_t lex_at;
    Token cur;
  };
  Mark mark() const { return {lex.at, cur}; }
  void reset(const Mark& m) {
    lex.at = m.lex_at;
    cur = m.cur;
  }

  [[noreturn]] void err(const std::string& msg) { lex.err(cur.pos, msg); }
  void advance() { cur = lex.next(); }
  bool at(Tok k) const { return cur.kind == k; }
  bool at_ident(const char* s) const { return cur.kind == Tok::Ident && cur.text == s; }
  void expect(Tok k, const char* what) {
    if (!at(k)) err(std::string("expected ") + what);
    advance();
  }
  void expect_ident(const char* s) {
    if (!at_ident(s)) err(std::string("expected '") + s + "'");
    advance();
  }

  // ---- expressions ----

  ExprPtr parse_expr() { return parse_addsub(); }

  ExprPtr parse_addsub() {
    ExprPtr e = parse_muldiv();
    for (;;) {
      if (at(Tok::Plus)) {
        advance();
        e = expr_add(e, parse_muldiv());
      } else if (at(Tok::Minus)) {
        advance();
        e = expr_sub(e, parse_muldiv());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_muldiv() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (at(Tok::Star)) {
        advance();
        e = expr_mul(e, parse_unary());
      } else if (at(Tok::Slash)) {
        advance();
        e = expr_div(e, parse_unary());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_unary() {
    if (at(Tok::Minus)) {
      advance();
      return expr_neg(parse_unary());
    }
    return parse_prim();
  }

  ExprPtr parse_prim() {
    if (at(Tok::Number)) {
      double v = cur.number;
      advance();
      return expr_const(v);
    }
    if (at(Tok::Attr)) {
      int a = cur.attr;
      advance();
      return expr_attr(a);
    }
    if (at(Tok::Ident)) {
      NullId id;
      if (ident_is_null(cur.text, id)) {
        advance();
        return expr_null(id);
      }
      err("unexpected identifier '" + cur.text + "' in expression");
    }
    if (at(Tok::LParen)) {
      advance();
      ExprPtr e = parse_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    err("expected an expression");
  }

  // ---- conditions ----

  CondPtr parse_cond() { return parse_or(); }

  CondPtr parse_or() {
    CondPtr c = parse_and();
    while (at_ident("or")) {
      advance();
      c = cond_or(c, parse_and());
    }
    return c;
  }

  CondPtr parse_and() {
    CondPtr c = parse_not();
    while (at_ident("and")) {
      advance();
      c = cond_and(c, parse_not());
    }
    return c;
  }

  CondPtr parse_not() {
    if (at_ident("not")) {
      advance();
      return cond_not(parse_not());
    }
    return parse_cond_prim();
  }

  CondPtr parse_cond_prim() {
    if (at_ident("isconst")) {
      advance();
      expect(Tok::LParen, "'('");
      if (!at(Tok::Attr)) err("expected a position like $1");
      int i = cur.attr;
      advance();
      expect(Tok::RParen, "')'");
      return cond_isconst(i);
    }
    if (at(Tok::LParen)) {
      // Either a parenthesized condition or a parenthesized expression
      // starting a comparison; try the condition reading first.
      Mark m = mark();
      advance();
      try {
        CondPtr inner = parse_cond();
        expect(Tok::RParen, "')'");
        return inner;
      } catch (const Error&) {
        reset(m);
      }
    }
    // Interval membership shortcut: $i in [lo, hi)
    if (at(Tok::Attr)) {
      Mark m = mark();
      int i = cur.attr;
      advance();
      if (at_ident("in")) {
        advance();
        return cond_interval(i, parse_interval());
      }
      reset(m);
    }
    ExprPtr lhs = parse_expr();
    CmpOp op;
    if (at(Tok::EqTok))
      op = CmpOp::Eq;
    else if (at(Tok::Ne))
      op = CmpOp::Ne;
    else if (at(Tok::Lt))
      op = CmpOp::Lt;
    else if (at(Tok::Gt))
      op = CmpOp::Gt;
    else if (at(Tok::Le))
      op = CmpOp::Le;
    else if (at(Tok::Ge))
      op = CmpOp::Ge;
    else
      err("expected a comparison operator");
    advance();
    ExprPtr rhs = parse_expr();
    // Plain position comparisons become core atoms.
    const bool attrs = lhs->kind == RatExpr::Kind::Attr && rhs->kind == RatExpr::Kind::Attr;
    if (attrs && op == CmpOp::Eq) return cond_eq(lhs->attr, rhs->attr);
    if (attrs && op == CmpOp::Lt) return cond_lt(lhs->attr, rhs->attr);
    if (attrs && op == CmpOp::Gt) return cond_lt(rhs->attr, lhs->attr);
    return cond_cmp(lhs, op, rhs);
  }

  IntervalSpec parse_interval() {
    IntervalSpec s;
    if (at(Tok::LBracket))
      s.lo_closed = true;
    else if (!at(Tok::LParen))
      err("expected '[' or '(' to open an interval");
    advance();
    s.lo = parse_bound(true);
    expect(Tok::Comma, "','");
    s.hi = parse_bound(false);
    if (at(Tok::RBracket))
      s.hi_closed = true;
    else if (!at(Tok::RParen))
      err("expected ']' or ')' to close an interval");
    advance();
    if (s.lo_infinite()) s.lo_closed = false;
    if (s.hi_infinite()) s.hi_closed = false;
    return s;
  }

  // nullptr encodes an infinite bound
  ExprPtr parse_bound(bool lo) {
    if (at(Tok::Minus)) {
      Mark m = mark();
      advance();
      if (at_ident("inf")) {
        advance();
        if (!lo) err("'-inf' is only valid as a lower bound");
        return nullptr;
      }
      reset(m);
    }
    if (at(Tok::Plus)) {
      advance();
      expect_ident("inf");
      if (lo) err("'+inf' is only valid as an upper bound");
      return nullptr;
    }
    if (at_ident("inf")) {
      advance();
      if (lo) err("'inf' is only valid as an upper bound");
      return nullptr;
    }
    return parse_expr();
  }

  // ---- queries ----

  AstPtr parse_query() { return parse_union(); }

  AstPtr parse_union() {
    AstPtr q = parse_term();
    for (;;) {
      if (at(Tok::Plus)) {
        advance();
        q = q_union(q, parse_term());
      } else if (at(Tok::Backslash)) {
        advance();
        q = q_except(q, parse_term());
      } else {
        return q;
      }
    }
  }

  AstPtr parse_term() {
    AstPtr q = parse_atom();
    while (at(Tok::Star)) {
      advance();
      q = q_product(q, parse_atom());
    }
    return q;
  }

  std::vector<int> parse_poslist_until(Tok stop) {
    std::vector<int> ps;
    if (at(stop)) return ps;
    for (;;) {
      if (!at(Tok::Attr)) err("expected a position like $1");
      ps.push_back(cur.attr);
      advance();
      if (at(Tok::Comma)) {
        advance();
        continue;
      }
      return ps;
    }
  }

  int parse_agg_pos() {
    expect(Tok::Semi, "';'");
    if (!at(Tok::Attr)) err("expected a position like $1");
    int p = cur.attr;
    advance();
    return p;
  }

  AstPtr parse_child() {
    expect(Tok::LParen, "'('");
    AstPtr q = parse_query();
    expect(Tok::RParen, "')'");
    return q;
  }

  AstPtr parse_atom() {
    if (at(Tok::LParen)) {
      advance();
      AstPtr q = parse_query();
      expect(Tok::RParen, "')'");
      return q;
    }
    if (!at(Tok::Ident)) err("expected a query");
    const std::string word = cur.text;
    if (!is_keyword(word)) {
      advance();
      return q_base(word);
    }
    if (word == "select") {
      advance();
      expect(Tok::LParen, "'('");
      CondPtr c = parse_cond();
      expect(Tok::Comma, "','");
      AstPtr q = parse_query();
      expect(Tok::RParen, "')'");
      return q_select(c, q);
    }
    if (word == "project") {
      advance();
      expect(Tok::LBracket, "'['");
      std::vector<int> ps = parse_poslist_until(Tok::RBracket);
      expect(Tok::RBracket, "']'");
      return q_project(std::move(ps), parse_child());
    }
    if (word == "apply") {
      advance();
      expect(Tok::LParen, "'('");
      ExprPtr f = parse_expr();
      expect(Tok::Comma, "','");
      AstPtr q = parse_query();
      expect(Tok::RParen, "')'");
      return q_apply(f, q);
    }
    if (word == "sum" || word == "avg" || word == "min" || word == "max") {
      advance();
      expect(Tok::LBracket, "'['");
      std::vector<int> ps = parse_poslist_until(Tok::Semi);
      int agg = parse_agg_pos();
      expect(Tok::RBracket, "']'");
      AstPtr c = parse_child();
      if (word == "sum") return q_sum(std::move(ps), agg, c);
      if (word == "avg") return q_avg(std::move(ps), agg, c);
      if (word == "min") return q_min(std::move(ps), agg, c);
      return q_max(std::move(ps), agg, c);
    }
    if (word == "count") {
      advance();
      expect(Tok::LBracket, "'['");
      std::vector<int> ps = parse_poslist_until(Tok::RBracket);
      expect(Tok::RBracket, "']'");
      return q_count(std::move(ps), parse_child());
    }
    if (word == "dedup") {
      advance();
      return q_dedup(parse_child());
    }
    if (word == "bag") {
      advance();
      expect(Tok::LBracket, "'['");
      if (!at(Tok::Number)) err("expected the bag arity");
      const double arity_d = cur.number;
      std::size_t arity = static_cast<std::size_t>(arity_d);
      if (arity_d != static_cast<double>(arity)) err("bag arity must be an integer");
      advance();
      expect(Tok::RBracket, "']'");
      expect(Tok::LBrace, "'{'");
      LiteralBag bag;
      bag.arity = arity;
      if (!at(Tok::RBrace)) {
        for (;;) {
          LiteralRow row;
          expect(Tok::LParen, "'('");
          if (!at(Tok::RParen)) {
            for (;;) {
              row.entries.push_back(parse_expr());
              if (at(Tok::Comma)) {
                advance();
                continue;
              }
              break;
            }
          }
          expect(Tok::RParen, "')'");
          if (row.entries.size() != arity)
            err("bag row has " + std::to_string(row.entries.size()) + " entries, arity is " +
                std::to_string(arity));
          if (at(Tok::Star)) {
            advance();
            if (!at(Tok::Number)) err("expected a multiplicity");
            const double m = cur.number;
            row.mult = static_cast<std::uint64_t>(m);
            if (m != static_cast<double>(row.mult) || row.mult == 0)
              err("multiplicity must be a positive integer");
            advance();
          }
          bag.rows.push_back(std::move(row));
          if (at(Tok::Comma)) {
            advance();
            continue;
          }
          break;
        }
      }
      expect(Tok::RBrace, "'}'");
      return q_literal(std::move(bag));
    }
    err("keyword '" + word + "' cannot start a query");
  }

  void expect_end() {
    if (!at(Tok::End)) err("unexpected trailing input");
  }
};

} // namespace

AstPtr query_parse(const std::string& text) {
  Parser p(text);
  AstPtr q = p.parse_query();
  p.expect_end();
  return q;
}

ExprPtr expr_parse(const std::string& text) {
  Parser p(text);
  ExprPtr e = p.parse_expr();
  p.expect_end();
  return e;
}

} // namespace nulldb
