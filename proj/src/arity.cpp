#include <unordered_map>

#include "nulldb/ast.hpp"

namespace nulldb {

namespace {

struct Checker {
  const Schema& schema;
  std::unordered_map<const QueryNode*, std::size_t> memo;

  [[noreturn]] void bad(const std::string& where, const std::string& what) {
    fail(ErrKind::Type, where + ": " + what);
  }

  void check_pos(const std::string& where, int pos, std::size_t arity) {
    if (pos < 1 || pos > static_cast<int>(arity))
      bad(where, "position $" + std::to_string(pos) + " outside arity " + std::to_string(arity));
  }

  void check_expr(const std::string& where, const ExprPtr& e, std::size_t arity, bool allow_nulls) {
    ExprFreeVars fv = expr_free_vars(e);
    for (int a : fv.attrs) check_pos(where, a, arity);
    if (!allow_nulls && !fv.nulls.empty())
      bad(where, "expression references null n" + std::to_string(*fv.nulls.begin()));
  }

  void check_interval(const std::string& where, const IntervalSpec& s, std::size_t arity,
                      bool allow_nulls) {
    if (!s.lo_infinite()) check_expr(where, s.lo, arity, allow_nulls);
    if (!s.hi_infinite()) check_expr(where, s.hi, arity, allow_nulls);
  }

  void check_cond(const CondPtr& c, std::size_t arity) {
    switch (c->kind) {
      case Condition::Kind::Eq:
      case Condition::Kind::Lt:
        check_pos("select", c->i, arity);
        check_pos("select", c->j, arity);
        return;
      case Condition::Kind::IsConst:
        check_pos("select", c->i, arity);
        return;
      case Condition::Kind::Cmp:
        check_expr("select", c->lhs, arity, false);
        check_expr("select", c->rhs, arity, false);
        return;
      case Condition::Kind::IntervalMember:
        check_pos("select", c->i, arity);
        check_interval("select", c->interval, arity, false);
        return;
      case Condition::Kind::And:
      case Condition::Kind::Or:
        check_cond(c->a, arity);
        check_cond(c->b, arity);
        return;
      case Condition::Kind::Not:
        check_cond(c->a, arity);
        return;
    }
  }

  std::size_t run(const AstPtr& q) {
    auto it = memo.find(q.get());
    if (it != memo.end()) return it->second;
    std::size_t out = 0;
    switch (q->kind) {
      case OpKind::Base: {
        auto sit = schema.find(q->base_name);
        if (sit == schema.end()) bad("base", "unknown relation " + q->base_name);
        out = sit->second;
        break;
      }
      case OpKind::Literal: {
        for (const LiteralRow& row : q->literal.rows) {
          if (row.entries.size() != q->literal.arity)
            bad("bag", "row arity mismatch");
          if (row.mult == 0) bad("bag", "zero multiplicity");
          for (const ExprPtr& e : row.entries) {
            ExprFreeVars fv = expr_free_vars(e);
            if (!fv.attrs.empty()) bad("bag", "literal entry references an attribute");
          }
        }
        out = q->literal.arity;
        break;
      }
      case OpKind::Project: {
        std::size_t n = run(q->left);
        for (int p : q->positions) check_pos("project", p, n);
        out = q->positions.size();
        break;
      }
      case OpKind::Select: {
        std::size_t n = run(q->left);
        check_cond(q->condition, n);
        out = n;
        break;
      }
      case OpKind::Product:
        out = run(q->left) + run(q->right);
        break;
      case OpKind::UnionAll:
      case OpKind::ExceptAll: {
        std::size_t l = run(q->left), r = run(q->right);
        if (l != r)
          bad(q->kind == OpKind::UnionAll ? "union" : "except",
              "operand arities " + std::to_string(l) + " and " + std::to_string(r) + " differ");
        out = l;
        break;
      }
      case OpKind::Apply: {
        std::size_t n = run(q->left);
        check_expr("apply", q->fn, n, false);
        out = n + 1;
        break;
      }
      case OpKind::SumGroup:
      case OpKind::Avg:
      case OpKind::Min:
      case OpKind::Max: {
        std::size_t n = run(q->left);
        const char* name = q->kind == OpKind::SumGroup ? "sum"
                           : q->kind == OpKind::Avg   ? "avg"
                           : q->kind == OpKind::Min   ? "min"
                                                      : "max";
        for (int p : q->positions) check_pos(name, p, n);
        check_pos(name, q->agg_pos, n);
        out = q->positions.size() + 1;
        break;
      }
      case OpKind::Count: {
        std::size_t n = run(q->left);
        for (int p : q->positions) check_pos("count", p, n);
        out = q->positions.size() + 1;
        break;
      }
      case OpKind::Dedup:
        out = run(q->left);
        break;
    }
    memo.emplace(q.get(), out);
    return out;
  }
};

} // namespace

std::size_t arity_check(const AstPtr& q, const Schema& schema) {
  Checker c{schema, {}};
  return c.run(q);
}

static bool cond_is_core(const CondPtr& c) {
  switch (c->kind) {
    case Condition::Kind::Eq:
    case Condition::Kind::Lt:
    case Condition::Kind::IsConst:
      return true;
    default:
      return false;
  }
}

bool ast_is_core(const AstPtr& q) {
  if (!q) return true;
  switch (q->kind) {
    case OpKind::Count:
    case OpKind::Avg:
    case OpKind::Min:
    case OpKind::Max:
    case OpKind::Dedup:
      return false;
    case OpKind::Select:
      if (!cond_is_core(q->condition)) return false;
      break;
    default:
      break;
  }
  return ast_is_core(q->left) && ast_is_core(q->right);
}

} // namespace nulldb
