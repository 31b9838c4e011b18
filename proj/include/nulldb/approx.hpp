#pragma once

#include "nulldb/eval.hpp"

namespace nulldb {

enum class Comparison { Less, Equal, Greater };

// "How likely is it that the number of answers consistent with the
// template compares to k this way?"
struct LikelihoodQuery {
  AstPtr query;
  Comparison cmp = Comparison::Equal;
  std::uint64_t k = 0;
  IntervalTuple intervals; // empty: every answer tuple counts
};

struct Estimate {
  double value = 0.0;       // hits / gamma, of the median trial
  double epsilon = 0.0;
  std::uint64_t gamma = 0;
  std::uint64_t seed = 0;
  std::uint64_t failures = 0; // skipped samples (when skipping is enabled)
  std::uint64_t hits = 0;
  std::uint64_t trials = 1;
};

struct ApproxOptions {
  std::uint64_t gamma_override = 0; // 0: use ceil(epsilon^-2)
  bool skip_bad_samples = false;
  unsigned threads = 1;
  std::uint64_t trials = 1; // odd; > 1 takes the median of that many runs
};

std::uint64_t gamma_for(double epsilon, const ApproxOptions& opts);

// Monte-Carlo additive approximation: gamma independent valuations, one
// complete evaluation each; the fraction of samples satisfying the
// comparison lands within epsilon of the true probability with
// probability at least 3/4.  trials > 1 amplifies the confidence by
// running that many independent windows of the sample stream and taking
// the median estimate.
Estimate like_apx(const LikelihoodQuery& lq, const IncompleteDatabase& db, double epsilon,
                  std::uint64_t seed, const ApproxOptions& opts = {});

enum class ThresholdVerdict { Above, NotAbove, Inconclusive };

struct ThresholdResult {
  ThresholdVerdict verdict = ThresholdVerdict::Inconclusive;
  double delta = 0.0;
  Estimate estimate;
};

ThresholdResult threshold_decide(const LikelihoodQuery& lq, double delta, const IncompleteDatabase& db,
                                 double epsilon, std::uint64_t seed, const ApproxOptions& opts = {});

const char* verdict_name(ThresholdVerdict v);

} // namespace nulldb
