#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nulldb/expr.hpp"

namespace nulldb {

struct Condition;
using CondPtr = std::shared_ptr<const Condition>;
struct QueryNode;
using AstPtr = std::shared_ptr<const QueryNode>;

enum class CmpOp { Eq, Ne, Lt, Gt, Le, Ge };

// One component of an answer template: an interval with expression
// endpoints (over nulls) or an infinite bound on either side.
struct IntervalSpec {
  ExprPtr lo, hi;          // null when the bound is infinite
  bool lo_closed = false;  // ignored for infinite bounds
  bool hi_closed = false;
  bool lo_infinite() const { return !lo; }
  bool hi_infinite() const { return !hi; }
};

using IntervalTuple = std::vector<IntervalSpec>;

// Selection predicate.  Eq / Lt / IsConst are the core atoms; Cmp,
// IntervalMember and the connectives are sugar removed by the desugarer.
struct Condition {
  enum class Kind { Eq, Lt, IsConst, Cmp, IntervalMember, And, Or, Not };
  Kind kind;
  int i = 0, j = 0;      // Eq/Lt positions; IsConst/IntervalMember position i
  ExprPtr lhs, rhs;      // Cmp operands
  CmpOp op = CmpOp::Eq;  // Cmp operator
  IntervalSpec interval; // IntervalMember
  CondPtr a, b;          // And/Or children; Not child in a
};

CondPtr cond_eq(int i, int j);
CondPtr cond_lt(int i, int j);
CondPtr cond_isconst(int i);
CondPtr cond_cmp(ExprPtr lhs, CmpOp op, ExprPtr rhs);
CondPtr cond_interval(int i, IntervalSpec spec);
CondPtr cond_and(CondPtr a, CondPtr b);
CondPtr cond_or(CondPtr a, CondPtr b);
CondPtr cond_not(CondPtr a);

// A literal bag whose entries are expressions: constants in source text,
// and possibly nulls or null expressions when built programmatically.
struct LiteralRow {
  std::vector<ExprPtr> entries;
  std::uint64_t mult = 1;
};
struct LiteralBag {
  std::size_t arity = 0;
  std::vector<LiteralRow> rows;
};

enum class OpKind {
  Base,
  Literal,
  Project,
  Select,
  Product,
  UnionAll,
  ExceptAll,
  Apply,
  SumGroup,
  // sugar
  Count,
  Avg,
  Min,
  Max,
  Dedup,
};

struct QueryNode {
  OpKind kind;
  std::string base_name;      // Base
  LiteralBag literal;         // Literal
  std::vector<int> positions; // Project columns; group columns for aggregates
  int agg_pos = 0;            // aggregated column for SumGroup/Avg/Min/Max
  CondPtr condition;          // Select
  ExprPtr fn;                 // Apply
  AstPtr left, right;
  // Rewriter bookkeeping: nonzero marks the root of a per-sample
  // fragment with its 1-based sample index.  Preserved by the desugarer.
  std::uint64_t sample_tag = 0;
};

AstPtr q_base(std::string name);
AstPtr q_literal(LiteralBag bag);
AstPtr q_project(std::vector<int> positions, AstPtr child);
AstPtr q_select(CondPtr c, AstPtr child);
AstPtr q_product(AstPtr l, AstPtr r);
AstPtr q_union(AstPtr l, AstPtr r);
AstPtr q_except(AstPtr l, AstPtr r);
AstPtr q_apply(ExprPtr fn, AstPtr child);
AstPtr q_sum(std::vector<int> groups, int agg, AstPtr child);
AstPtr q_count(std::vector<int> groups, AstPtr child);
AstPtr q_avg(std::vector<int> groups, int agg, AstPtr child);
AstPtr q_min(std::vector<int> groups, int agg, AstPtr child);
AstPtr q_max(std::vector<int> groups, int agg, AstPtr child);
AstPtr q_dedup(AstPtr child);
AstPtr with_sample_tag(const AstPtr& q, std::uint64_t tag);

bool ast_equal(const AstPtr& a, const AstPtr& b);
bool cond_equal(const CondPtr& a, const CondPtr& b);
// Number of distinct nodes in the DAG (shared subtrees counted once).
std::size_t ast_distinct_nodes(const AstPtr& q);

// Relation name -> arity, for checking queries against a database.
using Schema = std::map<std::string, std::size_t>;

// Validates positions, condition shapes and literal entries; returns the
// output arity.  Throws ErrKind::Type with the offending operator named.
std::size_t arity_check(const AstPtr& q, const Schema& schema);

// True when the tree uses only core operators (no sugar node, and only
// Eq/Lt/IsConst selection atoms).
bool ast_is_core(const AstPtr& q);

// Expands sugar into core operators; eval agrees on the result.  The
// schema is needed to place helper columns after existing ones.
AstPtr desugar(const AstPtr& q, const Schema& schema);

Schema schema_of(const struct IncompleteDatabase& db);

std::string query_print(const AstPtr& q);
AstPtr query_parse(const std::string& text);
std::string cond_print(const CondPtr& c);

} // namespace nulldb
