// Compiling sampling runs into single queries: the lookup table, the
// per-sample base-relation gadgets, and whole-run estimate queries whose
// naive evaluation must match the sampling loop bit for bit.
#include <doctest.h>

#include "nulldb/json_io.hpp"
#include "nulldb/rewrite.hpp"
#include "nulldb/rng.hpp"

using namespace nulldb;

namespace {

const char* kTwoNullDb = R"({
  "relations": {
    "R": {"arity": 2, "tuples": [[1, {"null": 1}], [{"null": 2}, 4], [1, 1]],
          "multiplicities": [2, 1, 1]},
    "S": {"arity": 1, "tuples": [[{"null": 1}], [2]], "multiplicities": [1, 3]}
  },
  "nulls": {"1": {"kind": "normal", "mu": 0, "sigma": 1},
            "2": {"kind": "uniform", "l": -2, "u": 2}}
})";

Valuation drawn_valuation(const IncompleteDatabase& db, std::uint64_t seed, std::uint64_t sample) {
  Valuation v;
  for (const auto& [id, d] : db.annotations) v[id] = null_draw(d, seed, id, sample);
  return v;
}

} // namespace

TEST_CASE("the lookup table holds one row per null with the shared draws") {
  const IncompleteDatabase db = db_from_json(kTwoNullDb);
  const std::uint64_t gamma = 5, seed = 31;
  const BagRelation rand = build_rand(db, gamma, seed);
  CHECK(rand.arity() == gamma + 1);
  CHECK(rand.total() == 2);
  for (const auto& [t, m] : rand.rows()) {
    REQUIRE(t.size() == gamma + 1);
    REQUIRE(t[0].is_null());
    const NullId id = t[0].null_id();
    const Distribution d = db.annotations.at(id);
    for (std::uint64_t j = 1; j <= gamma; ++j)
      CHECK(t[j].as_real() == null_draw(d, seed, id, j));
  }
}

TEST_CASE("compiled per-sample queries reproduce direct evaluation") {
  const IncompleteDatabase db = db_from_json(kTwoNullDb);
  const Schema schema = schema_of(db);
  const std::uint64_t gamma = 4, seed = 77;
  const BagRelation rand = build_rand(db, gamma, seed);
  const char* queries[] = {
      "R",
      "S",
      "project[$2](R)",
      "select($1 = $2, R)",
      "select($1 < $2, R)",
      "select(isconst($1), R)",
      "(R * S)",
      "(S + S)",
      "(project[$1](R) \\ S)",
      "apply($1 + $2, R)",
      "sum[$1; $2](R)",
      "sum[; $1](S)",
      "project[$1](select($2 < $3, apply($1 * $1, R)))",
      "bag[1]{(3), (4)*2}",
  };
  for (const char* s : queries) {
    CAPTURE(s);
    const AstPtr core = desugar(query_parse(s), schema);
    for (std::uint64_t j = 1; j <= gamma; ++j) {
      const AstPtr compiled = compile_valuation(core, schema, rand, j);
      CHECK(ast_is_core(compiled));
      const BagRelation via_rewrite = eval_query(compiled, db, EvalMode::Naive);
      const Valuation v = drawn_valuation(db, seed, j);
      const BagRelation direct = eval_query(core, apply_valuation(v, db), EvalMode::Complete);
      CHECK(via_rewrite == direct);
    }
  }
}

TEST_CASE("compile_valuation rejects what it cannot express") {
  const IncompleteDatabase db = db_from_json(kTwoNullDb);
  const Schema schema = schema_of(db);
  const BagRelation rand = build_rand(db, 2, 1);
  // sugar must be expanded first
  CHECK_THROWS_AS(compile_valuation(query_parse("dedup(R)"), schema, rand, 1), Error);
  // arity-0 base relations have no columns to route through the lookup
  Schema zero = schema;
  zero["Z"] = 0;
  CHECK_THROWS_AS(compile_valuation(query_parse("Z"), zero, rand, 1), Error);
  // literal nulls are an internal device of compiled output, not a way
  // to smuggle draws into a sampled query
  CHECK_THROWS_AS(compile_valuation(query_parse("bag[1]{(n1)}"), schema, rand, 1), Error);
}

TEST_CASE("whole-run compilation matches the sampling loop exactly") {
  const IncompleteDatabase db = db_from_json(kTwoNullDb);
  LikelihoodQuery lq;
  lq.query = query_parse("select($1 < $2, R)");
  lq.cmp = Comparison::Equal;
  lq.k = 2;
  ApproxOptions opts;
  opts.gamma_override = 16;

  for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
    const Estimate direct = like_apx(lq, db, 0.25, seed, opts);
    const CompiledQuery c = build_apx_query(lq, db, 0.25, seed, opts);
    CHECK(ast_is_core(c.query));
    CHECK(c.gamma == 16);
    CHECK(c.provenance.size() == 16);
    const BagRelation out = eval_query(c.query, db, EvalMode::Naive);
    REQUIRE(out.arity() == 1);
    REQUIRE(out.total() == 1);
    const double compiled_value = out.rows().begin()->first[0].as_real();
    CHECK(compiled_value == direct.value); // bit-identical, not approximate
  }
}

TEST_CASE("templates with expression endpoints compile too") {
  const IncompleteDatabase db = db_from_json(kTwoNullDb);
  LikelihoodQuery lq;
  lq.query = query_parse("project[$1](R)");
  lq.cmp = Comparison::Greater;
  lq.k = 1;
  IntervalSpec s;
  s.lo = expr_parse("n2 - 1"); // grounded per sample
  s.hi = expr_parse("2");
  s.lo_closed = true;
  lq.intervals = {s};
  ApproxOptions opts;
  opts.gamma_override = 8;
  const Estimate direct = like_apx(lq, db, 0.25, 7, opts);
  const CompiledQuery c = build_apx_query(lq, db, 0.25, 7, opts);
  const BagRelation out = eval_query(c.query, db, EvalMode::Naive);
  CHECK(out.rows().begin()->first[0].as_real() == direct.value);
}

TEST_CASE("compiled text parses back to the same tree") {
  const IncompleteDatabase db = db_from_json(kTwoNullDb);
  LikelihoodQuery lq;
  lq.query = query_parse("count[](R)");
  lq.cmp = Comparison::Greater;
  lq.k = 3;
  ApproxOptions opts;
  opts.gamma_override = 3;
  const CompiledQuery c = build_apx_query(lq, db, 0.3, 5, opts);
  const AstPtr reparsed = query_parse(query_print(c.query));
  CHECK(ast_equal(reparsed, c.query));
  // and naive evaluation of the reparsed text still agrees
  CHECK(eval_query(reparsed, db, EvalMode::Naive) == eval_query(c.query, db, EvalMode::Naive));
}

TEST_CASE("answer-space summary query") {
  const IncompleteDatabase db = db_from_json(R"({
    "relations": {"R": {"arity": 1, "tuples": [[{"null": 1}], [5]], "multiplicities": [1, 1]}},
    "nulls": {"1": {"kind": "uniform", "l": 0, "u": 1}}
  })");
  ApproxOptions opts;
  opts.gamma_override = 6;
  const CompiledQuery c = build_compute_query(query_parse("count[](R)"), db, 0.4, 13, opts);
  CHECK(ast_is_core(c.query));
  const BagRelation out = eval_query(c.query, db, EvalMode::Naive);
  // count[](R) is always (2): one answer tuple, count 1 per sample,
  // so the summary is a single row (2, 1, 1.0)
  REQUIRE(out.arity() == 3);
  REQUIRE(out.total() == 1);
  const Tuple& t = out.rows().begin()->first;
  CHECK(t[0].as_real() == 2.0);
  CHECK(t[1].as_real() == 1.0);
  CHECK(t[2].as_real() == 1.0);
}

TEST_CASE("summary fractions add up over the answer space") {
  const IncompleteDatabase db = db_from_json(kTwoNullDb);
  ApproxOptions opts;
  opts.gamma_override = 12;
  const CompiledQuery c =
      build_compute_query(query_parse("select($1 < 0, S)"), db, 0.3, 21, opts);
  const BagRelation out = eval_query(c.query, db, EvalMode::Naive);
  REQUIRE(out.arity() == 2 + 1); // answer column, count, fraction
  double mass = 0.0;
  for (const auto& [t, m] : out.rows()) {
    CHECK(m == 1);
    mass += t[2].as_real();
  }
  // every sample lands on exactly one (tuple, count) pattern per answer
  // row; with one possible answer tuple the fractions cover the samples
  CHECK(mass <= 1.0 + 1e-12);
  CHECK(mass > 0.0);
}

TEST_CASE("compilation validates its inputs") {
  const IncompleteDatabase db = db_from_json(kTwoNullDb);
  LikelihoodQuery lq;
  lq.query = query_parse("R");
  lq.cmp = Comparison::Equal;
  lq.k = 1;
  CHECK_THROWS_AS(build_apx_query(lq, db, 0.0, 1), Error);  // epsilon out of range
  CHECK_THROWS_AS(build_apx_query(lq, db, -1.0, 1), Error);
  lq.intervals.resize(3); // width mismatch
  CHECK_THROWS_AS(build_apx_query(lq, db, 0.3, 1), Error);
}
