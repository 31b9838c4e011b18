#include "nulldb/approx.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace nulldb {

std::uint64_t gamma_for(double epsilon, const ApproxOptions& opts) {
  if (opts.gamma_override) return opts.gamma_override;
  if (!(epsilon > 0.0 && epsilon <= 1.0)) fail(ErrKind::Config, "epsilon must lie in (0, 1]");
  return static_cast<std::uint64_t>(std::ceil(1.0 / (epsilon * epsilon)));
}

namespace {

void validate_likelihood(const LikelihoodQuery& lq, const IncompleteDatabase& db) {
  db.validate();
  const std::size_t arity = arity_check(lq.query, schema_of(db));
  if (!lq.intervals.empty() && lq.intervals.size() != arity)
    fail(ErrKind::Type, "answer template arity " + std::to_string(lq.intervals.size()) +
                            " does not match query arity " + std::to_string(arity));
  for (const IntervalSpec& s : lq.intervals) {
    for (const ExprPtr& e : {s.lo, s.hi}) {
      if (!e) continue;
      ExprFreeVars fv = expr_free_vars(e);
      if (!fv.attrs.empty()) fail(ErrKind::Type, "answer template endpoints cannot reference positions");
      for (NullId id : fv.nulls)
        if (!db.annotations.count(id))
          fail(ErrKind::Type, "answer template references unknown null n" + std::to_string(id));
    }
  }
}

bool compare_count(std::uint64_t count, Comparison cmp, std::uint64_t k) {
  switch (cmp) {
    case Comparison::Less: return count < k;
    case Comparison::Equal: return count == k;
    case Comparison::Greater: return count > k;
  }
  fail(ErrKind::Internal, "bad comparison");
}

} // namespace

Estimate like_apx(const LikelihoodQuery& lq, const IncompleteDatabase& db, double epsilon,
                  std::uint64_t seed, const ApproxOptions& opts) {
  validate_likelihood(lq, db);
  if (!(epsilon > 0.0 && epsilon <= 1.0)) fail(ErrKind::Config, "epsilon must lie in (0, 1]");
  const std::uint64_t gamma = gamma_for(epsilon, opts);
  if (gamma == 0) fail(ErrKind::Config, "gamma must be positive");
  const std::uint64_t trials = opts.trials ? opts.trials : 1;
  if (trials % 2 == 0) fail(ErrKind::Config, "trials must be odd so the median is one run");
  const AstPtr core = desugar(lq.query, schema_of(db));

  struct Shard {
    std::uint64_t hits = 0;
    std::uint64_t failures = 0;
    std::uint64_t abort_sample = 0; // first failing sample, 1-based; 0 = none
    std::string abort_message;
    ErrKind abort_kind = ErrKind::Internal;
  };

  auto run_range = [&](std::uint64_t from, std::uint64_t to, Shard& sh) {
    for (std::uint64_t j = from; j <= to; ++j) {
      try {
        const Valuation v = sample_valuation(db, seed, j);
        const IncompleteDatabase ground = apply_valuation(v, db);
        const BagRelation answers = eval_query(core, ground, EvalMode::Complete);
        const std::uint64_t count = count_consistent(lq.intervals, v, answers);
        if (compare_count(count, lq.cmp, lq.k)) ++sh.hits;
      } catch (const Error& e) {
        if (e.kind() == ErrKind::DivByZero && opts.skip_bad_samples) {
          ++sh.failures;
          continue;
        }
        sh.abort_sample = j;
        sh.abort_kind = e.kind();
        sh.abort_message = e.what();
        return;
      }
    }
  };

  // One trial covers the sample-index window (base, base + gamma]; the
  // counter-based stream makes windows independent of each other.
  auto run_trial = [&](std::uint64_t base, std::uint64_t& hits, std::uint64_t& failures) {
    const unsigned threads = std::max(1u, opts.threads);
    std::vector<Shard> shards;
    if (threads == 1 || gamma < 2 * threads) {
      shards.resize(1);
      run_range(base + 1, base + gamma, shards[0]);
    } else {
      shards.resize(threads);
      std::vector<std::thread> pool;
      const std::uint64_t chunk = (gamma + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        const std::uint64_t from = base + 1 + t * chunk;
        const std::uint64_t to = std::min<std::uint64_t>(base + gamma, from + chunk - 1);
        if (from > to) break;
        pool.emplace_back([&run_range, from, to, &shards, t] { run_range(from, to, shards[t]); });
      }
      for (auto& th : pool) th.join();
    }
    for (const Shard& sh : shards) {
      if (sh.abort_sample) {
        if (sh.abort_kind == ErrKind::DivByZero)
          fail(ErrKind::SampleAbort, "sample " + std::to_string(sh.abort_sample) + " failed: " +
                                         sh.abort_message +
                                         " (rerun with skip-bad-samples to tolerate)");
        throw Error(sh.abort_kind, sh.abort_message);
      }
      hits += sh.hits;
      failures += sh.failures;
    }
  };

  Estimate est;
  est.epsilon = epsilon;
  est.gamma = gamma;
  est.seed = seed;
  est.trials = trials;
  std::vector<std::uint64_t> trial_hits(trials, 0);
  for (std::uint64_t t = 0; t < trials; ++t) run_trial(t * gamma, trial_hits[t], est.failures);
  std::sort(trial_hits.begin(), trial_hits.end());
  est.hits = trial_hits[trials / 2];
  est.value = static_cast<double>(est.hits) / static_cast<double>(est.gamma);
  return est;
}

ThresholdResult threshold_decide(const LikelihoodQuery& lq, double delta, const IncompleteDatabase& db,
                                 double epsilon, std::uint64_t seed, const ApproxOptions& opts) {
  if (!(delta >= 0.0 && delta <= 1.0)) fail(ErrKind::Config, "delta must lie in [0, 1]");
  ThresholdResult out;
  out.delta = delta;
  out.estimate = like_apx(lq, db, epsilon, seed, opts);
  if (out.estimate.value - epsilon > delta)
    out.verdict = ThresholdVerdict::Above;
  else if (out.estimate.value + epsilon <= delta)
    out.verdict = ThresholdVerdict::NotAbove;
  else
    out.verdict = ThresholdVerdict::Inconclusive;
  return out;
}

const char* verdict_name(ThresholdVerdict v) {
  switch (v) {
    case ThresholdVerdict::Above: return "above";
    case ThresholdVerdict::NotAbove: return "not-above";
    case ThresholdVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

} // namespace nulldb
