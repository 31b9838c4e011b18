#pragma once

#include "nulldb/approx.hpp"

namespace nulldb {

// Compilation of a whole Monte-Carlo run into one query evaluated once,
// naively, over the incomplete database itself.  The draws are embedded
// as a literal lookup table with one row per null: (null, draw 1, ...,
// draw gamma).  Per sample i, each base relation is replaced by a gadget
// that joins every column through the lookup table, which substitutes
// the i-th draw for each null while leaving constants alone.

// The lookup table as a relation of arity gamma + 1.
BagRelation build_rand(const IncompleteDatabase& db, std::uint64_t gamma, std::uint64_t seed);

// Replaces every base relation in a core query by its sample-i gadget;
// the result evaluates naively to q(v_i(D)) for the i-th drawn valuation.
AstPtr compile_valuation(const AstPtr& core, const Schema& schema, const BagRelation& rand,
                         std::uint64_t sample);

struct CompiledQuery {
  AstPtr query; // core operators only
  double epsilon = 0.0;
  std::uint64_t gamma = 0;
  std::uint64_t seed = 0;
  // sample index (1-based) -> index of its fragment root in a preorder
  // walk of the compiled tree (shared nodes numbered at first visit).
  std::map<std::uint64_t, std::size_t> provenance;
};

// One arity-0 fragment per sample decides "does the consistent-answer
// count compare to k as asked", and their average is exactly the
// sampling estimate: evaluating this naively reproduces like_apx's
// value bit for bit.
CompiledQuery build_apx_query(const LikelihoodQuery& lq, const IncompleteDatabase& db, double epsilon,
                              std::uint64_t seed, const ApproxOptions& opts = {});

// Answer-space summary: rows (answer tuple, count, fraction of samples
// producing that count for that tuple).
CompiledQuery build_compute_query(const AstPtr& q, const IncompleteDatabase& db, double epsilon,
                                  std::uint64_t seed, const ApproxOptions& opts = {});

} // namespace nulldb
