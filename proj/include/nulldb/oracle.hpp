#pragma once

#include "nulldb/approx.hpp"

namespace nulldb {

// Independent ground truth for likelihood values, used to pin the
// sampling pipeline down in tests.

// Exact value by cell decomposition.  Works for queries where the event
// "count compares to k" is constant on product cells delimited, per
// null, by the finitely many constants the query and data mention:
// no value-creating aggregation, order comparisons only against columns
// that cannot hold a null, constant function applications, and constant
// template endpoints.  Everything else raises NotCellDecomposable.
// cells_out, when given, receives the number of cells integrated.
double exact_likelihood_cells(const LikelihoodQuery& lq, const IncompleteDatabase& db,
                              std::uint64_t cell_limit = 1000000,
                              std::uint64_t* cells_out = nullptr);

struct GridEstimate {
  double value = 0.0;
  // Mass of cells whose corners and midpoint disagree on the event,
  // plus the truncated tail mass; |value - truth| stays within this.
  double uncertainty = 0.0;
  std::uint64_t cells = 0;
};

// Quadrature fallback for up to three nulls: per-null grids uniform in
// probability over [1e-6, 1 - 1e-6], midpoint-rule sum of cell mass
// times the event indicator.
GridEstimate grid_likelihood(const LikelihoodQuery& lq, const IncompleteDatabase& db,
                             std::uint64_t resolution_per_null,
                             std::uint64_t cell_limit = 100000000);

} // namespace nulldb
