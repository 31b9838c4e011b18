#include "nulldb/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace nulldb {

namespace {

ExprPtr make(RatExpr e) { return std::make_shared<const RatExpr>(std::move(e)); }

int kind_rank(RatExpr::Kind k) { return static_cast<int>(k); }

} // namespace

ExprPtr expr_const(double v) {
  if (!std::isfinite(v)) fail(ErrKind::Type, "non-finite constant in expression");
  RatExpr e;
  e.kind = RatExpr::Kind::Const;
  e.value = v;
  return make(std::move(e));
}

ExprPtr expr_attr(int pos) {
  if (pos < 1) fail(ErrKind::Type, "attribute positions are 1-based");
  RatExpr e;
  e.kind = RatExpr::Kind::Attr;
  e.attr = pos;
  return make(std::move(e));
}

ExprPtr expr_null(NullId id) {
  RatExpr e;
  e.kind = RatExpr::Kind::NullVar;
  e.null_id = id;
  return make(std::move(e));
}

static ExprPtr binary(RatExpr::Kind k, ExprPtr a, ExprPtr b) {
  RatExpr e;
  e.kind = k;
  e.lhs = std::move(a);
  e.rhs = std::move(b);
  return make(std::move(e));
}

ExprPtr expr_add(ExprPtr a, ExprPtr b) { return binary(RatExpr::Kind::Add, std::move(a), std::move(b)); }
ExprPtr expr_sub(ExprPtr a, ExprPtr b) { return binary(RatExpr::Kind::Sub, std::move(a), std::move(b)); }
ExprPtr expr_mul(ExprPtr a, ExprPtr b) { return binary(RatExpr::Kind::Mul, std::move(a), std::move(b)); }
ExprPtr expr_div(ExprPtr a, ExprPtr b) { return binary(RatExpr::Kind::Div, std::move(a), std::move(b)); }

ExprPtr expr_neg(ExprPtr e) {
  if (e->kind == RatExpr::Kind::Const) return expr_const(-e->value);
  return expr_sub(expr_const(0.0), std::move(e));
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case RatExpr::Kind::Const: return a->value == b->value;
    case RatExpr::Kind::Attr: return a->attr == b->attr;
    case RatExpr::Kind::NullVar: return a->null_id == b->null_id;
    default: return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
  }
}

bool expr_less(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return false;
  if (a->kind != b->kind) return kind_rank(a->kind) < kind_rank(b->kind);
  switch (a->kind) {
    case RatExpr::Kind::Const: return a->value < b->value;
    case RatExpr::Kind::Attr: return a->attr < b->attr;
    case RatExpr::Kind::NullVar: return a->null_id < b->null_id;
    default:
      if (expr_less(a->lhs, b->lhs)) return true;
      if (expr_less(b->lhs, a->lhs)) return false;
      return expr_less(a->rhs, b->rhs);
  }
}

static void collect_vars(const ExprPtr& e, ExprFreeVars& out) {
  switch (e->kind) {
    case RatExpr::Kind::Const: return;
    case RatExpr::Kind::Attr: out.attrs.insert(e->attr); return;
    case RatExpr::Kind::NullVar: out.nulls.insert(e->null_id); return;
    default:
      collect_vars(e->lhs, out);
      collect_vars(e->rhs, out);
  }
}

ExprFreeVars expr_free_vars(const ExprPtr& e) {
  ExprFreeVars out;
  collect_vars(e, out);
  return out;
}

int expr_max_attr(const ExprPtr& e) {
  ExprFreeVars fv = expr_free_vars(e);
  return fv.attrs.empty() ? 0 : *fv.attrs.rbegin();
}

double expr_eval(const ExprPtr& e, const ExprEnv& env) {
  switch (e->kind) {
    case RatExpr::Kind::Const:
      return e->value;
    case RatExpr::Kind::Attr: {
      if (!env.attrs || e->attr > static_cast<int>(env.attrs->size()))
        fail(ErrKind::UnboundVariable, "no binding for attribute $" + std::to_string(e->attr));
      return (*env.attrs)[e->attr - 1];
    }
    case RatExpr::Kind::NullVar: {
      if (!env.nulls)
        fail(ErrKind::MissingNull, "no binding for null n" + std::to_string(e->null_id));
      auto it = env.nulls->find(e->null_id);
      if (it == env.nulls->end())
        fail(ErrKind::MissingNull, "no binding for null n" + std::to_string(e->null_id));
      return it->second;
    }
    case RatExpr::Kind::Add: return expr_eval(e->lhs, env) + expr_eval(e->rhs, env);
    case RatExpr::Kind::Sub: return expr_eval(e->lhs, env) - expr_eval(e->rhs, env);
    case RatExpr::Kind::Mul: return expr_eval(e->lhs, env) * expr_eval(e->rhs, env);
    case RatExpr::Kind::Div: {
      const double num = expr_eval(e->lhs, env);
      const double den = expr_eval(e->rhs, env);
      if (den == 0.0) fail(ErrKind::DivByZero, "division by zero in expression");
      return num / den;
    }
  }
  fail(ErrKind::Internal, "bad expression kind");
}

ExprPtr expr_ground_nulls(const ExprPtr& e, const std::map<NullId, double>& v) {
  switch (e->kind) {
    case RatExpr::Kind::Const:
    case RatExpr::Kind::Attr:
      return e;
    case RatExpr::Kind::NullVar: {
      auto it = v.find(e->null_id);
      return it == v.end() ? e : expr_const(it->second);
    }
    default: {
      ExprPtr l = expr_ground_nulls(e->lhs, v);
      ExprPtr r = expr_ground_nulls(e->rhs, v);
      if (l.get() == e->lhs.get() && r.get() == e->rhs.get()) return e;
      return binary(e->kind, std::move(l), std::move(r));
    }
  }
}

ExprPtr expr_subst_attrs(const ExprPtr& e, const std::vector<ExprPtr>& args) {
  switch (e->kind) {
    case RatExpr::Kind::Const:
    case RatExpr::Kind::NullVar:
      return e;
    case RatExpr::Kind::Attr: {
      if (e->attr > static_cast<int>(args.size()))
        fail(ErrKind::Type, "substitution has no expression for $" + std::to_string(e->attr));
      return args[e->attr - 1];
    }
    default:
      return binary(e->kind, expr_subst_attrs(e->lhs, args), expr_subst_attrs(e->rhs, args));
  }
}

// ---- printing ----

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

static void print_rec(const ExprPtr& e, std::string& out) {
  switch (e->kind) {
    case RatExpr::Kind::Const: out += format_double(e->value); return;
    case RatExpr::Kind::Attr: out += "$" + std::to_string(e->attr); return;
    case RatExpr::Kind::NullVar: out += "n" + std::to_string(e->null_id); return;
    case RatExpr::Kind::Sub:
      // unary minus form
      if (e->lhs->kind == RatExpr::Kind::Const && e->lhs->value == 0.0 &&
          e->rhs->kind != RatExpr::Kind::Const) {
        out += "-";
        print_rec(e->rhs, out);
        return;
      }
      [[fallthrough]];
    default: {
      const char* op = e->kind == RatExpr::Kind::Add   ? " + "
                       : e->kind == RatExpr::Kind::Sub ? " - "
                       : e->kind == RatExpr::Kind::Mul ? " * "
                                                       : " / ";
      out += "(";
      print_rec(e->lhs, out);
      out += op;
      print_rec(e->rhs, out);
      out += ")";
    }
  }
}

std::string expr_print(const ExprPtr& e) {
  std::string out;
  print_rec(e, out);
  return out;
}

} // namespace nulldb
