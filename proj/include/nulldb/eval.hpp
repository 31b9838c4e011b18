#pragma once

#include "nulldb/ast.hpp"
#include "nulldb/database.hpp"

namespace nulldb {

// Complete: every cell must be a real; the mode for evaluating q(v(D)).
// Naive: nulls are opaque constants; equality and grouping are by
// syntactic identity, order comparisons and arithmetic over a null are
// errors, and isconst($i) distinguishes reals from nulls.
enum class EvalMode { Complete, Naive };

BagRelation eval_query(const AstPtr& q, const IncompleteDatabase& db, EvalMode mode);

// Number of answer tuples (with multiplicity) that fall inside the
// grounded answer template: endpoint expressions are evaluated under v
// and each tuple component is tested against its interval.  An empty
// template is vacuously satisfied by every tuple.
std::uint64_t count_consistent(const IntervalTuple& a, const Valuation& v, const BagRelation& answers);

} // namespace nulldb
