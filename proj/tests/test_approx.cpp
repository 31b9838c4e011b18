// Monte-Carlo likelihood estimation: sample counts, determinism,
// threading, failure handling, threshold decisions.
#include <doctest.h>

#include <algorithm>

#include "nulldb/approx.hpp"
#include "nulldb/json_io.hpp"

using namespace nulldb;

namespace {

const char* kExpDb = R"({
  "relations": {"R": {"arity": 1, "tuples": [[{"null": 1}]], "multiplicities": [1]}},
  "nulls": {"1": {"kind": "exponential", "lambda": 1.0}}
})";

LikelihoodQuery below_one(Comparison cmp, std::uint64_t k) {
  LikelihoodQuery lq;
  lq.query = query_parse("select($1 < 1, R)");
  lq.cmp = cmp;
  lq.k = k;
  return lq;
}

} // namespace

TEST_CASE("gamma_for") {
  CHECK(gamma_for(0.05, {}) == 400);
  CHECK(gamma_for(0.1, {}) == 100);
  CHECK(gamma_for(0.2, {}) == 25);
  CHECK(gamma_for(0.3, {}) == 12); // ceil(1/0.09)
  CHECK(gamma_for(1.0, {}) == 1);
  ApproxOptions o;
  o.gamma_override = 7;
  CHECK(gamma_for(0.05, o) == 7);
  CHECK_THROWS_AS(gamma_for(0.0, {}), Error);
  CHECK_THROWS_AS(gamma_for(-0.1, {}), Error);
  CHECK_THROWS_AS(gamma_for(1.5, {}), Error);
}

TEST_CASE("like_apx estimates the exponential fixture") {
  const IncompleteDatabase db = db_from_json(kExpDb);
  const Estimate e = like_apx(below_one(Comparison::Equal, 1), db, 0.05, 42);
  CHECK(e.gamma == 400);
  CHECK(e.seed == 42);
  CHECK(e.failures == 0);
  CHECK(e.value == static_cast<double>(e.hits) / 400.0);
  // true value is 1 - exp(-1); a fixed seed lands well inside epsilon
  CHECK(e.value == doctest::Approx(0.6321205588285577).epsilon(0.1));

  // same seed, same estimate; other seeds may differ
  CHECK(like_apx(below_one(Comparison::Equal, 1), db, 0.05, 42).value == e.value);

  // the complement count comparison mirrors the value on shared draws
  const Estimate lt = like_apx(below_one(Comparison::Less, 1), db, 0.05, 42);
  CHECK(lt.hits + e.hits == 400); // answer is empty or a single row
}

TEST_CASE("interval templates restrict which answers count") {
  const IncompleteDatabase db = db_from_json(kExpDb);
  LikelihoodQuery lq;
  lq.query = query_parse("R");
  lq.cmp = Comparison::Greater;
  lq.k = 0;
  IntervalSpec s;
  s.hi = expr_parse("1");
  lq.intervals = {s};
  const Estimate via_template = like_apx(lq, db, 0.05, 42);
  const Estimate via_select = like_apx(below_one(Comparison::Equal, 1), db, 0.05, 42);
  // both describe the event "the null fell below 1" on shared draws
  CHECK(via_template.value == via_select.value);
}

TEST_CASE("threading does not change the result") {
  const IncompleteDatabase db = db_from_json(kExpDb);
  ApproxOptions four;
  four.threads = 4;
  const Estimate a = like_apx(below_one(Comparison::Equal, 1), db, 0.05, 9);
  const Estimate b = like_apx(below_one(Comparison::Equal, 1), db, 0.05, 9, four);
  CHECK(a.value == b.value);
  CHECK(a.hits == b.hits);
}

TEST_CASE("median-of-means trials") {
  const IncompleteDatabase db = db_from_json(kExpDb);
  ApproxOptions o;
  o.gamma_override = 32;

  // replicate the three windows by hand; window t covers sample
  // indices (t*gamma, (t+1)*gamma] of the same stream
  const AstPtr core = desugar(query_parse("select($1 < 1, R)"), schema_of(db));
  std::vector<std::uint64_t> raw_hits;
  for (std::uint64_t t = 0; t < 3; ++t) {
    std::uint64_t hits = 0;
    for (std::uint64_t j = t * 32 + 1; j <= (t + 1) * 32; ++j) {
      const Valuation v = sample_valuation(db, 6, j);
      const BagRelation answers = eval_query(core, apply_valuation(v, db), EvalMode::Complete);
      if (answers.total() == 1) ++hits;
    }
    raw_hits.push_back(hits);
  }

  o.trials = 3;
  const Estimate e = like_apx(below_one(Comparison::Equal, 1), db, 0.05, 6, o);
  std::vector<std::uint64_t> sorted = raw_hits;
  std::sort(sorted.begin(), sorted.end());
  CHECK(e.trials == 3);
  CHECK(e.gamma == 32);
  CHECK(e.hits == sorted[1]);
  CHECK(e.value == static_cast<double>(sorted[1]) / 32.0);

  // a single trial is exactly the first window
  o.trials = 1;
  CHECK(like_apx(below_one(Comparison::Equal, 1), db, 0.05, 6, o).hits == raw_hits[0]);

  o.trials = 4;
  CHECK_THROWS_AS(like_apx(below_one(Comparison::Equal, 1), db, 0.05, 6, o), Error);
  try {
    like_apx(below_one(Comparison::Equal, 1), db, 0.05, 6, o);
  } catch (const Error& err) {
    CHECK(err.kind() == ErrKind::Config);
  }
}

TEST_CASE("partition across count comparisons on shared samples") {
  const IncompleteDatabase db = db_from_json(R"({
    "relations": {"R": {"arity": 1,
      "tuples": [[{"null": 1}], [{"null": 2}]], "multiplicities": [1, 2]}},
    "nulls": {"1": {"kind": "normal", "mu": 0, "sigma": 1},
              "2": {"kind": "uniform", "l": -1, "u": 1}}
  })");
  for (std::uint64_t k : {0ull, 1ull, 2ull, 3ull}) {
    LikelihoodQuery lq;
    lq.query = query_parse("select($1 < 0.2, R)");
    lq.k = k;
    ApproxOptions o;
    o.gamma_override = 64;
    lq.cmp = Comparison::Less;
    const Estimate lt = like_apx(lq, db, 0.25, 5, o);
    lq.cmp = Comparison::Equal;
    const Estimate eq = like_apx(lq, db, 0.25, 5, o);
    lq.cmp = Comparison::Greater;
    const Estimate gt = like_apx(lq, db, 0.25, 5, o);
    CHECK(lt.hits + eq.hits + gt.hits == 64);
    CHECK(lt.value + eq.value + gt.value == 1.0);
  }
}

TEST_CASE("divide-by-zero samples abort unless skipping is on") {
  // 1/n1 with n1 ~ Uniform(-1, 1): no drawn double is ever exactly 0,
  // so this runs clean; 1/(n1 - n1) fails in every sample.
  const IncompleteDatabase db = db_from_json(R"({
    "relations": {"R": {"arity": 1, "tuples": [[{"null": 1}]], "multiplicities": [1]}},
    "nulls": {"1": {"kind": "uniform", "l": -1.0, "u": 1.0}}
  })");
  LikelihoodQuery lq;
  lq.query = query_parse("apply(1 / ($1 - $1), R)");
  lq.cmp = Comparison::Greater;
  lq.k = 0;
  ApproxOptions o;
  o.gamma_override = 10;
  CHECK_THROWS_AS(like_apx(lq, db, 0.5, 1, o), Error);
  try {
    like_apx(lq, db, 0.5, 1, o);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::SampleAbort);
  }
  o.skip_bad_samples = true;
  const Estimate e = like_apx(lq, db, 0.5, 1, o);
  CHECK(e.failures == 10);
  CHECK(e.value == 0.0);
}

TEST_CASE("likelihood validation") {
  const IncompleteDatabase db = db_from_json(kExpDb);
  LikelihoodQuery lq;
  lq.query = query_parse("R");
  lq.cmp = Comparison::Less;
  lq.k = 0;
  // a count is never negative, so "below zero" is simply probability 0
  CHECK(like_apx(lq, db, 0.5, 1).value == 0.0);

  lq.cmp = Comparison::Equal;
  lq.k = 1;
  IntervalSpec s;
  s.lo = expr_parse("$1"); // template endpoints range over nulls only
  lq.intervals = {s};
  CHECK_THROWS_AS(like_apx(lq, db, 0.1, 1), Error);

  lq.intervals = {IntervalSpec{}, IntervalSpec{}}; // width 2 vs arity 1
  CHECK_THROWS_AS(like_apx(lq, db, 0.1, 1), Error);

  lq.intervals.clear();
  s.lo = nullptr;
  s.hi = expr_parse("n9"); // n9 has no annotation
  lq.intervals = {s};
  CHECK_THROWS_AS(like_apx(lq, db, 0.1, 1), Error);
}

TEST_CASE("threshold decisions") {
  const IncompleteDatabase db = db_from_json(kExpDb);
  const LikelihoodQuery lq = below_one(Comparison::Equal, 1);
  // true value ~0.632
  CHECK(threshold_decide(lq, 0.2, db, 0.05, 11).verdict == ThresholdVerdict::Above);
  CHECK(threshold_decide(lq, 0.9, db, 0.05, 11).verdict == ThresholdVerdict::NotAbove);
  // delta right at the value: one epsilon band cannot separate
  const ThresholdResult near = threshold_decide(lq, 0.632, db, 0.02, 11);
  CHECK(near.verdict == ThresholdVerdict::Inconclusive);
  CHECK(near.estimate.gamma == 2500);
  CHECK_THROWS_AS(threshold_decide(lq, -0.1, db, 0.05, 11), Error);
  CHECK_THROWS_AS(threshold_decide(lq, 1.1, db, 0.05, 11), Error);
  CHECK(std::string(verdict_name(ThresholdVerdict::Above)) == "above");
  CHECK(std::string(verdict_name(ThresholdVerdict::NotAbove)) == "not-above");
  CHECK(std::string(verdict_name(ThresholdVerdict::Inconclusive)) == "inconclusive");
}

TEST_CASE("estimates serialize to the documented shape") {
  Estimate e;
  e.value = 0.25;
  e.epsilon = 0.5;
  e.gamma = 4;
  e.seed = 3;
  e.hits = 1;
  CHECK(estimate_to_json(e, -1) ==
        R"({"value":0.25,"epsilon":0.5,"gamma":4,"seed":3,"trials":1,"failures":0})");
}
