#include "nulldb/ast.hpp"

#include <set>

namespace nulldb {

namespace {
CondPtr mc(Condition c) { return std::make_shared<const Condition>(std::move(c)); }
AstPtr mq(QueryNode n) { return std::make_shared<const QueryNode>(std::move(n)); }
} // namespace

CondPtr cond_eq(int i, int j) {
  Condition c;
  c.kind = Condition::Kind::Eq;
  c.i = i;
  c.j = j;
  return mc(std::move(c));
}
CondPtr cond_lt(int i, int j) {
  Condition c;
  c.kind = Condition::Kind::Lt;
  c.i = i;
  c.j = j;
  return mc(std::move(c));
}
CondPtr cond_isconst(int i) {
  Condition c;
  c.kind = Condition::Kind::IsConst;
  c.i = i;
  return mc(std::move(c));
}
CondPtr cond_cmp(ExprPtr lhs, CmpOp op, ExprPtr rhs) {
  Condition c;
  c.kind = Condition::Kind::Cmp;
  c.lhs = std::move(lhs);
  c.op = op;
  c.rhs = std::move(rhs);
  return mc(std::move(c));
}
CondPtr cond_interval(int i, IntervalSpec spec) {
  Condition c;
  c.kind = Condition::Kind::IntervalMember;
  c.i = i;
  c.interval = std::move(spec);
  return mc(std::move(c));
}
CondPtr cond_and(CondPtr a, CondPtr b) {
  Condition c;
  c.kind = Condition::Kind::And;
  c.a = std::move(a);
  c.b = std::move(b);
  return mc(std::move(c));
}
CondPtr cond_or(CondPtr a, CondPtr b) {
  Condition c;
  c.kind = Condition::Kind::Or;
  c.a = std::move(a);
  c.b = std::move(b);
  return mc(std::move(c));
}
CondPtr cond_not(CondPtr a) {
  Condition c;
  c.kind = Condition::Kind::Not;
  c.a = std::move(a);
  return mc(std::move(c));
}

AstPtr q_base(std::string name) {
  QueryNode n;
  n.kind = OpKind::Base;
  n.base_name = std::move(name);
  return mq(std::move(n));
}
AstPtr q_literal(LiteralBag bag) {
  QueryNode n;
  n.kind = OpKind::Literal;
  n.literal = std::move(bag);
  return mq(std::move(n));
}
AstPtr q_project(std::vector<int> positions, AstPtr child) {
  QueryNode n;
  n.kind = OpKind::Project;
  n.positions = std::move(positions);
  n.left = std::move(child);
  return mq(std::move(n));
}
AstPtr q_select(CondPtr c, AstPtr child) {
  QueryNode n;
  n.kind = OpKind::Select;
  n.condition = std::move(c);
  n.left = std::move(child);
  return mq(std::move(n));
}
static AstPtr q_binary(OpKind k, AstPtr l, AstPtr r) {
  QueryNode n;
  n.kind = k;
  n.left = std::move(l);
  n.right = std::move(r);
  return mq(std::move(n));
}
AstPtr q_product(AstPtr l, AstPtr r) { return q_binary(OpKind::Product, std::move(l), std::move(r)); }
AstPtr q_union(AstPtr l, AstPtr r) { return q_binary(OpKind::UnionAll, std::move(l), std::move(r)); }
AstPtr q_except(AstPtr l, AstPtr r) { return q_binary(OpKind::ExceptAll, std::move(l), std::move(r)); }
AstPtr q_apply(ExprPtr fn, AstPtr child) {
  QueryNode n;
  n.kind = OpKind::Apply;
  n.fn = std::move(fn);
  n.left = std::move(child);
  return mq(std::move(n));
}
static AstPtr q_agg(OpKind k, std::vector<int> groups, int agg, AstPtr child) {
  QueryNode n;
  n.kind = k;
  n.positions = std::move(groups);
  n.agg_pos = agg;
  n.left = std::move(child);
  return mq(std::move(n));
}
AstPtr q_sum(std::vector<int> groups, int agg, AstPtr child) {
  return q_agg(OpKind::SumGroup, std::move(groups), agg, std::move(child));
}
AstPtr q_count(std::vector<int> groups, AstPtr child) {
  return q_agg(OpKind::Count, std::move(groups), 0, std::move(child));
}
AstPtr q_avg(std::vector<int> groups, int agg, AstPtr child) {
  return q_agg(OpKind::Avg, std::move(groups), agg, std::move(child));
}
AstPtr q_min(std::vector<int> groups, int agg, AstPtr child) {
  return q_agg(OpKind::Min, std::move(groups), agg, std::move(child));
}
AstPtr q_max(std::vector<int> groups, int agg, AstPtr child) {
  return q_agg(OpKind::Max, std::move(groups), agg, std::move(child));
}
AstPtr q_dedup(AstPtr child) {
  QueryNode n;
  n.kind = OpKind::Dedup;
  n.left = std::move(child);
  return mq(std::move(n));
}

AstPtr with_sample_tag(const AstPtr& q, std::uint64_t tag) {
  QueryNode n = *q;
  n.sample_tag = tag;
  return mq(std::move(n));
}

static bool interval_equal(const IntervalSpec& x, const IntervalSpec& y) {
  if (x.lo_infinite() != y.lo_infinite() || x.hi_infinite() != y.hi_infinite()) return false;
  if (!x.lo_infinite() && (!expr_equal(x.lo, y.lo) || x.lo_closed != y.lo_closed)) return false;
  if (!x.hi_infinite() && (!expr_equal(x.hi, y.hi) || x.hi_closed != y.hi_closed)) return false;
  return true;
}

bool cond_equal(const CondPtr& a, const CondPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Condition::Kind::Eq:
    case Condition::Kind::Lt:
      return a->i == b->i && a->j == b->j;
    case Condition::Kind::IsConst:
      return a->i == b->i;
    case Condition::Kind::Cmp:
      return a->op == b->op && expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
    case Condition::Kind::IntervalMember:
      return a->i == b->i && interval_equal(a->interval, b->interval);
    case Condition::Kind::And:
    case Condition::Kind::Or:
      return cond_equal(a->a, b->a) && cond_equal(a->b, b->b);
    case Condition::Kind::Not:
      return cond_equal(a->a, b->a);
  }
  return false;
}

static bool literal_equal(const LiteralBag& x, const LiteralBag& y) {
  if (x.arity != y.arity || x.rows.size() != y.rows.size()) return false;
  for (std::size_t r = 0; r < x.rows.size(); ++r) {
    if (x.rows[r].mult != y.rows[r].mult) return false;
    if (x.rows[r].entries.size() != y.rows[r].entries.size()) return false;
    for (std::size_t c = 0; c < x.rows[r].entries.size(); ++c)
      if (!expr_equal(x.rows[r].entries[c], y.rows[r].entries[c])) return false;
  }
  return true;
}

bool ast_equal(const AstPtr& a, const AstPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case OpKind::Base:
      return a->base_name == b->base_name;
    case OpKind::Literal:
      return literal_equal(a->literal, b->literal);
    case OpKind::Project:
      return a->positions == b->positions && ast_equal(a->left, b->left);
    case OpKind::Select:
      return cond_equal(a->condition, b->condition) && ast_equal(a->left, b->left);
    case OpKind::Product:
    case OpKind::UnionAll:
    case OpKind::ExceptAll:
      return ast_equal(a->left, b->left) && ast_equal(a->right, b->right);
    case OpKind::Apply:
      return expr_equal(a->fn, b->fn) && ast_equal(a->left, b->left);
    case OpKind::SumGroup:
    case OpKind::Avg:
    case OpKind::Min:
    case OpKind::Max:
      return a->positions == b->positions && a->agg_pos == b->agg_pos && ast_equal(a->left, b->left);
    case OpKind::Count:
      return a->positions == b->positions && ast_equal(a->left, b->left);
    case OpKind::Dedup:
      return ast_equal(a->left, b->left);
  }
  return false;
}

static void collect_nodes(const AstPtr& q, std::set<const QueryNode*>& seen) {
  if (!q || !seen.insert(q.get()).second) return;
  collect_nodes(q->left, seen);
  collect_nodes(q->right, seen);
}

std::size_t ast_distinct_nodes(const AstPtr& q) {
  std::set<const QueryNode*> seen;
  collect_nodes(q, seen);
  return seen.size();
}

} // namespace nulldb
