#include "nulldb/eval.hpp"

#include <cmath>

namespace nulldb {

Schema schema_of(const IncompleteDatabase& db) {
  Schema s;
  for (const auto& [name, rel] : db.relations) s[name] = rel.arity();
  return s;
}

namespace {

struct Evaluator {
  const IncompleteDatabase& db;
  EvalMode mode;

  double cell_real(const Value& v, const char* what) const {
    if (v.is_null())
      fail(ErrKind::NullComparison, std::string(what) + " over the null n" + std::to_string(v.null_id()));
    return v.as_real();
  }

  // Evaluates an attribute expression on a tuple; only the positions the
  // expression actually reads must hold reals.
  double tuple_expr(const ExprPtr& e, const Tuple& t) const {
    switch (e->kind) {
      case RatExpr::Kind::Const:
        return e->value;
      case RatExpr::Kind::Attr:
        return cell_real(t[e->attr - 1], "arithmetic");
      case RatExpr::Kind::NullVar:
        fail(ErrKind::MissingNull, "free null n" + std::to_string(e->null_id) + " in a query expression");
      case RatExpr::Kind::Add:
        return tuple_expr(e->lhs, t) + tuple_expr(e->rhs, t);
      case RatExpr::Kind::Sub:
        return tuple_expr(e->lhs, t) - tuple_expr(e->rhs, t);
      case RatExpr::Kind::Mul:
        return tuple_expr(e->lhs, t) * tuple_expr(e->rhs, t);
      case RatExpr::Kind::Div: {
        const double num = tuple_expr(e->lhs, t);
        const double den = tuple_expr(e->rhs, t);
        if (den == 0.0) fail(ErrKind::DivByZero, "division by zero in query expression");
        return num / den;
      }
    }
    fail(ErrKind::Internal, "bad expression kind");
  }

  bool in_interval(double x, const IntervalSpec& s, const Tuple& t) const {
    if (!s.lo_infinite()) {
      const double lo = tuple_expr(s.lo, t);
      if (!std::isfinite(lo)) fail(ErrKind::Type, "interval bound evaluated to a non-finite value");
      if (s.lo_closed ? x < lo : x <= lo) return false;
    }
    if (!s.hi_infinite()) {
      const double hi = tuple_expr(s.hi, t);
      if (!std::isfinite(hi)) fail(ErrKind::Type, "interval bound evaluated to a non-finite value");
      if (s.hi_closed ? x > hi : x >= hi) return false;
    }
    return true;
  }

  bool cond_true(const CondPtr& c, const Tuple& t) const {
    switch (c->kind) {
      case Condition::Kind::Eq:
        return t[c->i - 1] == t[c->j - 1];
      case Condition::Kind::Lt:
        return cell_real(t[c->i - 1], "order comparison") < cell_real(t[c->j - 1], "order comparison");
      case Condition::Kind::IsConst:
        return t[c->i - 1].is_real();
      case Condition::Kind::Cmp: {
        const double l = tuple_expr(c->lhs, t);
        const double r = tuple_expr(c->rhs, t);
        switch (c->op) {
          case CmpOp::Eq: return l == r;
          case CmpOp::Ne: return l != r;
          case CmpOp::Lt: return l < r;
          case CmpOp::Gt: return l > r;
          case CmpOp::Le: return l <= r;
          case CmpOp::Ge: return l >= r;
        }
        fail(ErrKind::Internal, "bad comparison operator");
      }
      case Condition::Kind::IntervalMember:
        return in_interval(cell_real(t[c->i - 1], "interval test"), c->interval, t);
      case Condition::Kind::And:
        return cond_true(c->a, t) && cond_true(c->b, t);
      case Condition::Kind::Or:
        return cond_true(c->a, t) || cond_true(c->b, t);
      case Condition::Kind::Not:
        return !cond_true(c->a, t);
    }
    fail(ErrKind::Internal, "bad condition kind");
  }

  Value literal_entry(const ExprPtr& e) const {
    if (e->kind == RatExpr::Kind::Const) return Value::real(e->value);
    if (e->kind == RatExpr::Kind::NullVar) {
      if (mode == EvalMode::Complete)
        fail(ErrKind::NullComparison, "null n" + std::to_string(e->null_id) + " in a literal under complete evaluation");
      return Value::null(e->null_id);
    }
    ExprFreeVars fv = expr_free_vars(e);
    if (!fv.nulls.empty())
      fail(ErrKind::NullComparison, "literal entry mixes nulls with arithmetic");
    ExprEnv env;
    return Value::real(expr_eval(e, env));
  }

  BagRelation eval(const AstPtr& q) {
    switch (q->kind) {
      case OpKind::Base: {
        auto it = db.relations.find(q->base_name);
        if (it == db.relations.end()) fail(ErrKind::Type, "unknown relation " + q->base_name);
        return it->second;
      }
      case OpKind::Literal: {
        BagRelation out(q->literal.arity);
        for (const LiteralRow& row : q->literal.rows) {
          Tuple t;
          t.reserve(row.entries.size());
          for (const ExprPtr& e : row.entries) t.push_back(literal_entry(e));
          out.add(t, row.mult);
        }
        return out;
      }
      case OpKind::Project: {
        BagRelation in = eval(q->left);
        BagRelation out(q->positions.size());
        for (const auto& [t, m] : in.rows()) {
          Tuple nt;
          nt.reserve(q->positions.size());
          for (int p : q->positions) nt.push_back(t[p - 1]);
          out.add(nt, m);
        }
        return out;
      }
      case OpKind::Select: {
        BagRelation in = eval(q->left);
        BagRelation out(in.arity());
        for (const auto& [t, m] : in.rows())
          if (cond_true(q->condition, t)) out.add(t, m);
        return out;
      }
      case OpKind::Product: {
        BagRelation l = eval(q->left);
        BagRelation r = eval(q->right);
        BagRelation out(l.arity() + r.arity());
        for (const auto& [lt, lm] : l.rows())
          for (const auto& [rt, rm] : r.rows()) {
            Tuple t = lt;
            t.insert(t.end(), rt.begin(), rt.end());
            std::uint64_t m;
            if (__builtin_mul_overflow(lm, rm, &m)) fail(ErrKind::Overflow, "multiplicity overflow");
            out.add(t, m);
          }
        return out;
      }
      case OpKind::UnionAll: {
        BagRelation l = eval(q->left);
        BagRelation r = eval(q->right);
        BagRelation out = l;
        for (const auto& [t, m] : r.rows()) out.add(t, m);
        return out;
      }
      case OpKind::ExceptAll: {
        BagRelation l = eval(q->left);
        BagRelation r = eval(q->right);
        BagRelation out(l.arity());
        for (const auto& [t, m] : l.rows()) {
          const std::uint64_t sub = r.multiplicity(t);
          if (m > sub) out.add(t, m - sub);
        }
        return out;
      }
      case OpKind::Apply: {
        BagRelation in = eval(q->left);
        BagRelation out(in.arity() + 1);
        for (const auto& [t, m] : in.rows()) {
          Tuple nt = t;
          nt.push_back(Value::real(tuple_expr(q->fn, t)));
          out.add(nt, m);
        }
        return out;
      }
      case OpKind::SumGroup: {
        BagRelation in = eval(q->left);
        std::map<Tuple, double, TupleLess> sums;
        for (const auto& [t, m] : in.rows()) {
          Tuple key;
          key.reserve(q->positions.size());
          for (int p : q->positions) key.push_back(t[p - 1]);
          sums[key] += static_cast<double>(m) * cell_real(t[q->agg_pos - 1], "summation");
        }
        if (q->positions.empty() && sums.empty()) sums[Tuple{}] = 0.0;
        BagRelation out(q->positions.size() + 1);
        for (const auto& [key, total] : sums) {
          Tuple t = key;
          t.push_back(Value::real(total));
          out.add(t, 1);
        }
        return out;
      }
      case OpKind::Count: {
        BagRelation in = eval(q->left);
        std::map<Tuple, double, TupleLess> counts;
        for (const auto& [t, m] : in.rows()) {
          Tuple key;
          key.reserve(q->positions.size());
          for (int p : q->positions) key.push_back(t[p - 1]);
          counts[key] += static_cast<double>(m) * 1.0;
        }
        if (q->positions.empty() && counts.empty()) counts[Tuple{}] = 0.0;
        BagRelation out(q->positions.size() + 1);
        for (const auto& [key, total] : counts) {
          Tuple t = key;
          t.push_back(Value::real(total));
          out.add(t, 1);
        }
        return out;
      }
      case OpKind::Avg: {
        BagRelation in = eval(q->left);
        std::map<Tuple, std::pair<double, double>, TupleLess> acc; // sum, count
        for (const auto& [t, m] : in.rows()) {
          Tuple key;
          key.reserve(q->positions.size());
          for (int p : q->positions) key.push_back(t[p - 1]);
          auto& slot = acc[key];
          slot.first += static_cast<double>(m) * cell_real(t[q->agg_pos - 1], "summation");
          slot.second += static_cast<double>(m) * 1.0;
        }
        if (q->positions.empty() && acc.empty()) acc[Tuple{}] = {0.0, 0.0};
        BagRelation out(q->positions.size() + 1);
        for (const auto& [key, sc] : acc) {
          if (sc.second == 0.0) fail(ErrKind::DivByZero, "division by zero in query expression");
          Tuple t = key;
          t.push_back(Value::real(sc.first / sc.second));
          out.add(t, 1);
        }
        return out;
      }
      case OpKind::Min:
      case OpKind::Max: {
        const bool is_min = q->kind == OpKind::Min;
        BagRelation in = eval(q->left);
        std::map<Tuple, double, TupleLess> best;
        for (const auto& [t, m] : in.rows()) {
          Tuple key;
          key.reserve(q->positions.size());
          for (int p : q->positions) key.push_back(t[p - 1]);
          const double v = cell_real(t[q->agg_pos - 1], "order comparison");
          auto [it, fresh] = best.emplace(key, v);
          if (!fresh) it->second = is_min ? std::min(it->second, v) : std::max(it->second, v);
        }
        BagRelation out(q->positions.size() + 1);
        for (const auto& [key, v] : best) {
          Tuple t = key;
          t.push_back(Value::real(v));
          out.add(t, 1);
        }
        return out;
      }
      case OpKind::Dedup: {
        BagRelation in = eval(q->left);
        BagRelation out(in.arity());
        for (const auto& [t, m] : in.rows()) out.add(t, 1);
        return out;
      }
    }
    fail(ErrKind::Internal, "bad operator kind");
  }
};

} // namespace

BagRelation eval_query(const AstPtr& q, const IncompleteDatabase& db, EvalMode mode) {
  if (mode == EvalMode::Complete && !db.complete())
    fail(ErrKind::Type, "complete evaluation over a database that still contains nulls");
  arity_check(q, schema_of(db));
  Evaluator ev{db, mode};
  return ev.eval(q);
}

std::uint64_t count_consistent(const IntervalTuple& a, const Valuation& v, const BagRelation& answers) {
  if (a.empty()) return answers.total();
  if (a.size() != answers.arity())
    fail(ErrKind::Type, "answer template arity " + std::to_string(a.size()) +
                            " does not match answer arity " + std::to_string(answers.arity()));
  // Ground the endpoints once.
  struct Bound {
    bool infinite;
    double value;
  };
  std::vector<Bound> lo(a.size()), hi(a.size());
  ExprEnv env;
  env.nulls = &v;
  for (std::size_t i = 0; i < a.size(); ++i) {
    lo[i].infinite = a[i].lo_infinite();
    hi[i].infinite = a[i].hi_infinite();
    if (!lo[i].infinite) {
      lo[i].value = expr_eval(a[i].lo, env);
      if (!std::isfinite(lo[i].value)) fail(ErrKind::Type, "grounded endpoint is not finite");
    }
    if (!hi[i].infinite) {
      hi[i].value = expr_eval(a[i].hi, env);
      if (!std::isfinite(hi[i].value)) fail(ErrKind::Type, "grounded endpoint is not finite");
    }
  }
  std::uint64_t total = 0;
  for (const auto& [t, m] : answers.rows()) {
    bool ok = true;
    for (std::size_t i = 0; ok && i < a.size(); ++i) {
      const Value& cell = t[i];
      if (cell.is_null())
        fail(ErrKind::NullComparison, "answer tuple still contains a null");
      const double x = cell.as_real();
      if (!lo[i].infinite && (a[i].lo_closed ? x < lo[i].value : x <= lo[i].value)) ok = false;
      if (ok && !hi[i].infinite && (a[i].hi_closed ? x > hi[i].value : x >= hi[i].value)) ok = false;
    }
    if (ok && __builtin_add_overflow(total, m, &total)) fail(ErrKind::Overflow, "multiplicity overflow");
  }
  return total;
}

} // namespace nulldb
