#pragma once

#include <set>

#include "nulldb/eval.hpp"
#include "nulldb/polynomial.hpp"

namespace nulldb {

// Symbolic answer spaces: a finite list of (symbolic database, condition
// set) pairs.  Entries are rational expressions over nulls in canonical
// form; a condition set holds under a valuation when every member
// evaluates to a negative number.  The pairs of a well-formed world
// cover the valuation space and are pairwise disjoint up to measure
// zero.

struct ExprVecLess {
  bool operator()(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) const {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (expr_less(a[i], b[i])) return true;
      if (expr_less(b[i], a[i])) return false;
    }
    return a.size() < b.size();
  }
};

struct SymbolicRelation {
  std::size_t arity = 0;
  std::map<std::vector<ExprPtr>, std::uint64_t, ExprVecLess> rows;

  void add(const std::vector<ExprPtr>& t, std::uint64_t mult);
};

struct SymbolicDatabase {
  std::map<std::string, SymbolicRelation> relations;
};

// Members are canonical expressions e, each read as "e < 0".
using ConditionSet = std::set<ExprPtr, ExprLess>;

struct WorldPair {
  SymbolicDatabase db;
  ConditionSet conditions;
};

struct ConditionalWorld {
  std::vector<WorldPair> pairs;
  std::map<NullId, Distribution> annotations;
};

// One pair holding the database itself under the vacuous condition -1 < 0.
ConditionalWorld world_of(const IncompleteDatabase& db);

bool cond_holds(const ConditionSet& c, const Valuation& v);

struct LiftOptions {
  std::uint64_t blowup_cap = 4096;
  bool prune = true;
};

// Applies the query pair by pair.  Strict order selections split each
// pair into one branch per subset of the distinct non-constant entry
// differences; rows with constant differences are decided on the spot.
// The output databases hold the single relation "result".
ConditionalWorld lift(const AstPtr& q, const ConditionalWorld& w, const Schema& schema,
                      const LiftOptions& opts = {});

// Drops pairs that are syntactically unsatisfiable: a nonnegative
// constant member, or both e and -e present.
ConditionalWorld prune_world(const ConditionalWorld& w);

struct WorldValidation {
  std::uint64_t samples = 0;
  std::uint64_t coverage_hits = 0;           // samples with at least one holding pair
  std::uint64_t disjointness_violations = 0; // samples with two or more holding pairs
  std::uint64_t boundary_resamples = 0;
};

WorldValidation validate_world(const ConditionalWorld& w, std::uint64_t n_samples, std::uint64_t seed);

// Evaluates the unique holding pair under v; NoBranch / MultiBranch
// when no pair or several pairs hold.
IncompleteDatabase instantiate(const ConditionalWorld& w, const Valuation& v);

struct ExtensionCheck {
  std::uint64_t samples = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t boundary_resamples = 0;
  std::uint64_t world_pairs = 0;
};

// Samples valuations and compares instantiate(lift(q, world_of(db)))
// against direct complete evaluation of q over v(db).
ExtensionCheck check_trivial_extension(const AstPtr& q, const IncompleteDatabase& db,
                                       std::uint64_t n_samples, std::uint64_t seed,
                                       const LiftOptions& opts = {});

} // namespace nulldb
