#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "nulldb/distribution.hpp"
#include "nulldb/value.hpp"

namespace nulldb {

// A bag (multiset) of fixed-arity tuples.  Rows are kept in a sorted map
// so iteration order, and with it evaluation and serialization, is
// deterministic.
class BagRelation {
public:
  explicit BagRelation(std::size_t arity = 0) : arity_(arity) {}

  std::size_t arity() const { return arity_; }
  bool empty() const { return rows_.empty(); }
  std::size_t distinct_count() const { return rows_.size(); }

  void add(const Tuple& t, std::uint64_t mult = 1);
  std::uint64_t multiplicity(const Tuple& t) const;
  // Sum of all multiplicities.
  std::uint64_t total() const;

  const std::map<Tuple, std::uint64_t, TupleLess>& rows() const { return rows_; }

  friend bool operator==(const BagRelation& x, const BagRelation& y) {
    return x.arity_ == y.arity_ && x.rows_ == y.rows_;
  }

private:
  std::size_t arity_;
  std::map<Tuple, std::uint64_t, TupleLess> rows_;
};

// Incomplete database: named bag relations whose cells may be marked
// nulls, plus exactly one density annotation per null in use.
struct IncompleteDatabase {
  std::map<std::string, BagRelation> relations;
  std::map<NullId, Distribution> annotations;

  // Every null appearing in some relation, in id order.
  std::set<NullId> nulls_used() const;
  // Checks the annotation keys coincide with nulls_used().
  void validate() const;
  bool complete() const { return nulls_used().empty(); }
};

// An assignment of reals to nulls.
using Valuation = std::map<NullId, double>;

// Replaces nulls by their values; collapsed duplicate rows add their
// multiplicities, so the total count per relation is preserved.
BagRelation apply_valuation_rel(const Valuation& v, const BagRelation& rel);
IncompleteDatabase apply_valuation(const Valuation& v, const IncompleteDatabase& db);

// One independent inverse-CDF draw per null; the draw for null i in
// sample `index` is a pure function of (seed, i, index).
Valuation sample_valuation(const IncompleteDatabase& db, std::uint64_t seed, std::uint64_t index);

} // namespace nulldb
