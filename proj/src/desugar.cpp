#include <unordered_map>

#include "nulldb/ast.hpp"

namespace nulldb {

// The desugarer expands the convenience operators into the core algebra:
//   count[g](q)          -> sum[g; n+1](apply(1, q))
//   dedup(q)             -> project[1..n](sum[1..n; n+1](apply(1, q)))
//   avg[g; j](q)         -> join of sum and count on the group, then a ratio
//   min/max[g; j](q)     -> distinct (group, value) pairs minus dominated ones
//   select(f w g, q)     -> apply both sides, compare the two new columns,
//                           project them away; >=, <=, != go through bag
//                           difference with the strict complement
//   select(a and b, q)   -> select(a, select(b, q))
//   select(a or b, q)    -> (select(a,q) + select(b,q)) \ select(b, select(a,q))
//   select(not a, q)     -> q \ select(a, q)
//   $i in I              -> conjunction of bound comparisons
// Arities of subqueries are needed to place the helper columns, so the
// database schema is required.
namespace {

struct Desugarer {
  const Schema& schema;
  std::unordered_map<const QueryNode*, AstPtr> memo;
  std::unordered_map<const QueryNode*, std::size_t> arity_memo;

  std::size_t arity(const AstPtr& q) {
    auto it = arity_memo.find(q.get());
    if (it != arity_memo.end()) return it->second;
    std::size_t n = arity_check(q, schema);
    arity_memo.emplace(q.get(), n);
    return n;
  }

  static AstPtr app1(const AstPtr& q) { return q_apply(expr_const(1.0), q); }

  static std::vector<int> iota(int from, int to) { // inclusive
    std::vector<int> v;
    for (int i = from; i <= to; ++i) v.push_back(i);
    return v;
  }

  AstPtr count_core(const std::vector<int>& groups, const AstPtr& core_child) {
    const int n = static_cast<int>(arity(core_child));
    return q_sum(groups, n + 1, app1(core_child));
  }

  AstPtr dedup_core(const AstPtr& core_child) {
    const int n = static_cast<int>(arity(core_child));
    return q_project(iota(1, n), q_sum(iota(1, n), n + 1, app1(core_child)));
  }

  // Equality of the first k columns with the k columns after position off.
  AstPtr eq_block(AstPtr q, int k, int off) {
    for (int t = k; t >= 1; --t) q = q_select(cond_eq(t, off + t), std::move(q));
    return q;
  }

  // select(f w g, child) for strict/equality operators; other operators
  // are handled by difference in sel_cmp.
  AstPtr sel_cmp_strict(const ExprPtr& f, CmpOp op, const ExprPtr& g, const AstPtr& child) {
    const int n = static_cast<int>(arity(child));
    AstPtr stacked = q_apply(g, q_apply(f, child)); // f at n+1, g at n+2
    CondPtr atom;
    switch (op) {
      case CmpOp::Eq: atom = cond_eq(n + 1, n + 2); break;
      case CmpOp::Lt: atom = cond_lt(n + 1, n + 2); break;
      case CmpOp::Gt: atom = cond_lt(n + 2, n + 1); break;
      default: fail(ErrKind::Internal, "non-strict operator in sel_cmp_strict");
    }
    return q_project(iota(1, n), q_select(atom, std::move(stacked)));
  }

  AstPtr sel_cmp(const ExprPtr& f, CmpOp op, const ExprPtr& g, const AstPtr& child) {
    switch (op) {
      case CmpOp::Eq:
      case CmpOp::Lt:
      case CmpOp::Gt:
        return sel_cmp_strict(f, op, g, child);
      case CmpOp::Ne:
        return q_except(child, sel_cmp_strict(f, CmpOp::Eq, g, child));
      case CmpOp::Le:
        return q_except(child, sel_cmp_strict(f, CmpOp::Gt, g, child));
      case CmpOp::Ge:
        return q_except(child, sel_cmp_strict(f, CmpOp::Lt, g, child));
    }
    fail(ErrKind::Internal, "bad comparison operator");
  }

  AstPtr sel(const CondPtr& c, const AstPtr& child) {
    switch (c->kind) {
      case Condition::Kind::Eq:
      case Condition::Kind::Lt:
      case Condition::Kind::IsConst:
        return q_select(c, child);
      case Condition::Kind::And:
        return sel(c->a, sel(c->b, child));
      case Condition::Kind::Or: {
        AstPtr x = sel(c->a, child);
        AstPtr y = sel(c->b, child);
        AstPtr both = sel(c->b, x);
        return q_except(q_union(std::move(x), std::move(y)), std::move(both));
      }
      case Condition::Kind::Not:
        return q_except(child, sel(c->a, child));
      case Condition::Kind::Cmp:
        return sel_cmp(c->lhs, c->op, c->rhs, child);
      case Condition::Kind::IntervalMember: {
        const IntervalSpec& s = c->interval;
        ExprPtr attr = expr_attr(c->i);
        CondPtr lo, hi;
        if (!s.lo_infinite()) lo = cond_cmp(attr, s.lo_closed ? CmpOp::Ge : CmpOp::Gt, s.lo);
        if (!s.hi_infinite()) hi = cond_cmp(attr, s.hi_closed ? CmpOp::Le : CmpOp::Lt, s.hi);
        if (lo && hi) return sel(cond_and(lo, hi), child);
        if (lo) return sel(lo, child);
        if (hi) return sel(hi, child);
        return child; // both bounds infinite: always true
      }
    }
    fail(ErrKind::Internal, "bad condition kind");
  }

  // (group, value) pairs of A matched with every pair of B in the same
  // group: output (group, a_value, b_value).
  AstPtr join_on_group(const AstPtr& a, const AstPtr& b, int k) {
    AstPtr prod = q_product(a, b);
    AstPtr matched = eq_block(std::move(prod), k, k + 1);
    std::vector<int> keep = iota(1, k + 1);
    keep.push_back(2 * k + 2);
    return q_project(std::move(keep), std::move(matched));
  }

  AstPtr minmax(const AstPtr& core_child, const std::vector<int>& groups, int agg, bool is_min) {
    const int k = static_cast<int>(groups.size());
    std::vector<int> cols = groups;
    cols.push_back(agg);
    AstPtr pairs = q_project(cols, core_child); // (group, value), arity k+1
    AstPtr distinct = dedup_core(pairs);
    AstPtr witness = join_on_group(pairs, pairs, k); // (group, cand, other), arity k+2
    CondPtr beaten = is_min ? cond_lt(k + 2, k + 1)  // other < candidate
                            : cond_lt(k + 1, k + 2); // candidate < other
    AstPtr dominated = q_project(iota(1, k + 1), q_select(beaten, std::move(witness)));
    return q_except(std::move(distinct), std::move(dominated));
  }

  AstPtr run(const AstPtr& q) {
    auto it = memo.find(q.get());
    if (it != memo.end()) return it->second;
    AstPtr out;
    switch (q->kind) {
      case OpKind::Base:
      case OpKind::Literal:
        out = q;
        break;
      case OpKind::Project:
        out = q_project(q->positions, run(q->left));
        break;
      case OpKind::Select:
        out = sel(q->condition, run(q->left));
        break;
      case OpKind::Product:
        out = q_product(run(q->left), run(q->right));
        break;
      case OpKind::UnionAll:
        out = q_union(run(q->left), run(q->right));
        break;
      case OpKind::ExceptAll:
        out = q_except(run(q->left), run(q->right));
        break;
      case OpKind::Apply:
        out = q_apply(q->fn, run(q->left));
        break;
      case OpKind::SumGroup:
        out = q_sum(q->positions, q->agg_pos, run(q->left));
        break;
      case OpKind::Count:
        out = count_core(q->positions, run(q->left));
        break;
      case OpKind::Dedup:
        out = dedup_core(run(q->left));
        break;
      case OpKind::Avg: {
        AstPtr child = run(q->left);
        const int k = static_cast<int>(q->positions.size());
        AstPtr sums = q_sum(q->positions, q->agg_pos, child);
        AstPtr counts = count_core(q->positions, child);
        AstPtr joined = eq_block(q_product(std::move(sums), std::move(counts)), k, k + 1);
        AstPtr ratio = q_apply(expr_div(expr_attr(k + 1), expr_attr(2 * k + 2)), std::move(joined));
        std::vector<int> keep = iota(1, k);
        keep.push_back(2 * k + 3);
        out = q_project(std::move(keep), std::move(ratio));
        break;
      }
      case OpKind::Min:
        out = minmax(run(q->left), q->positions, q->agg_pos, true);
        break;
      case OpKind::Max:
        out = minmax(run(q->left), q->positions, q->agg_pos, false);
        break;
    }
    if (q->sample_tag && out->sample_tag != q->sample_tag) out = with_sample_tag(out, q->sample_tag);
    memo.emplace(q.get(), out);
    return out;
  }
};

} // namespace

AstPtr desugar(const AstPtr& q, const Schema& schema) {
  Desugarer d{schema, {}, {}};
  return d.run(q);
}

} // namespace nulldb
