// Bag-semantics evaluation: every operator against hand-computed
// results, native sugar against its core expansion, and the
// consistent-answer counter.
#include <doctest.h>

#include "nulldb/eval.hpp"
#include "nulldb/json_io.hpp"
#include "nulldb/rng.hpp"

using namespace nulldb;

namespace {

Tuple row(std::initializer_list<double> xs) {
  Tuple t;
  for (double x : xs) t.push_back(Value::real(x));
  return t;
}

BagRelation rel(std::size_t arity,
                std::initializer_list<std::pair<std::initializer_list<double>, std::uint64_t>> rows) {
  BagRelation r(arity);
  for (const auto& [xs, m] : rows) r.add(row(xs), m);
  return r;
}

IncompleteDatabase db_with(const char* name, BagRelation r) {
  IncompleteDatabase db;
  db.relations.emplace(name, std::move(r));
  return db;
}

BagRelation run(const std::string& q, const IncompleteDatabase& db,
                EvalMode mode = EvalMode::Complete) {
  return eval_query(query_parse(q), db, mode);
}

} // namespace

TEST_CASE("base, literal, project") {
  const IncompleteDatabase db = db_with("R", rel(2, {{{1, 2}, 2}, {{3, 4}, 1}}));
  CHECK(run("R", db) == rel(2, {{{1, 2}, 2}, {{3, 4}, 1}}));
  CHECK(run("project[$2, $1](R)", db) == rel(2, {{{2, 1}, 2}, {{4, 3}, 1}}));
  CHECK(run("project[$1, $1](R)", db) == rel(2, {{{1, 1}, 2}, {{3, 3}, 1}}));
  // projecting away all columns leaves counting information
  CHECK(run("project[](R)", db) == rel(0, {{{}, 3}}));
  // projections that collapse rows add multiplicities
  const IncompleteDatabase db2 = db_with("R", rel(2, {{{1, 2}, 2}, {{1, 9}, 3}}));
  CHECK(run("project[$1](R)", db2) == rel(1, {{{1}, 5}}));
  CHECK(run("bag[2]{(1, 2)*2, (3, 4)}", db) == rel(2, {{{1, 2}, 2}, {{3, 4}, 1}}));
  CHECK(run("bag[0]{}", db) == BagRelation(0));
  // literal entries may be closed expressions
  CHECK(run("bag[1]{(2 + 3 * 4)}", db) == rel(1, {{{14}, 1}}));
}

TEST_CASE("select core atoms on reals") {
  const IncompleteDatabase db =
      db_with("R", rel(2, {{{1, 2}, 2}, {{2, 2}, 1}, {{3, 1}, 1}}));
  CHECK(run("select($1 < $2, R)", db) == rel(2, {{{1, 2}, 2}}));
  CHECK(run("select($1 = $2, R)", db) == rel(2, {{{2, 2}, 1}}));
  CHECK(run("select(isconst($1), R)", db) ==
        rel(2, {{{1, 2}, 2}, {{2, 2}, 1}, {{3, 1}, 1}}));
}

TEST_CASE("product, union-all, except-all") {
  IncompleteDatabase db;
  db.relations.emplace("A", rel(1, {{{1}, 2}}));
  db.relations.emplace("B", rel(1, {{{5}, 1}, {{6}, 3}}));
  CHECK(run("(A * B)", db) == rel(2, {{{1, 5}, 2}, {{1, 6}, 6}}));
  CHECK(run("(B + B)", db) == rel(1, {{{5}, 2}, {{6}, 6}}));

  IncompleteDatabase db2;
  db2.relations.emplace("A", rel(1, {{{1}, 3}, {{2}, 1}}));
  db2.relations.emplace("B", rel(1, {{{1}, 1}, {{3}, 5}}));
  // bag difference truncates at zero
  CHECK(run("(A \\ B)", db2) == rel(1, {{{1}, 2}, {{2}, 1}}));
  CHECK(run("(B \\ A)", db2) == rel(1, {{{3}, 5}}));
  CHECK(run("(A \\ A)", db2) == BagRelation(1));
}

TEST_CASE("apply appends a computed column") {
  const IncompleteDatabase db = db_with("R", rel(2, {{{1, 2}, 2}, {{3, 4}, 1}}));
  CHECK(run("apply($1 + $2, R)", db) == rel(3, {{{1, 2, 3}, 2}, {{3, 4, 7}, 1}}));
  CHECK(run("apply(0.5, R)", db) == rel(3, {{{1, 2, 0.5}, 2}, {{3, 4, 0.5}, 1}}));
  CHECK(run("apply($2 / $1, R)", db) == rel(3, {{{1, 2, 2}, 2}, {{3, 4, 4.0 / 3.0}, 1}}));

  const IncompleteDatabase zdb = db_with("R", rel(2, {{{1, 0}, 1}}));
  CHECK_THROWS_AS(run("apply($1 / $2, R)", zdb), Error);
}

TEST_CASE("grouped sums weight by multiplicity") {
  const IncompleteDatabase db =
      db_with("R", rel(2, {{{1, 2}, 2}, {{2, 2}, 1}, {{3, 1}, 1}}));
  CHECK(run("sum[$1; $2](R)", db) == rel(2, {{{1, 4}, 1}, {{2, 2}, 1}, {{3, 1}, 1}}));
  CHECK(run("sum[; $2](R)", db) == rel(1, {{{7}, 1}}));
  CHECK(run("sum[; $1](R)", db) == rel(1, {{{7}, 1}}));
  CHECK(run("sum[$1; $1](R)", db) == rel(2, {{{1, 2}, 1}, {{2, 2}, 1}, {{3, 3}, 1}}));

  // grand totals over an empty input produce the zero row; grouped sums
  // produce nothing
  const IncompleteDatabase empty = db_with("R", BagRelation(2));
  CHECK(run("sum[; $1](R)", empty) == rel(1, {{{0}, 1}}));
  CHECK(run("sum[$1; $2](R)", empty) == BagRelation(2));
}

TEST_CASE("counting sugar") {
  const IncompleteDatabase db =
      db_with("R", rel(2, {{{1, 2}, 2}, {{2, 2}, 1}, {{3, 1}, 1}}));
  CHECK(run("count[$1](R)", db) == rel(2, {{{1, 2}, 1}, {{2, 1}, 1}, {{3, 1}, 1}}));
  CHECK(run("count[](R)", db) == rel(1, {{{4}, 1}}));
  const IncompleteDatabase empty = db_with("R", BagRelation(2));
  CHECK(run("count[](R)", empty) == rel(1, {{{0}, 1}}));
  CHECK(run("count[$1](R)", empty) == BagRelation(2));
}

TEST_CASE("average, min, max, dedup sugar") {
  const IncompleteDatabase db =
      db_with("R", rel(2, {{{1, 5}, 1}, {{1, 2}, 1}, {{2, 7}, 2}}));
  CHECK(run("avg[$1; $2](R)", db) == rel(2, {{{1, 3.5}, 1}, {{2, 7}, 1}}));
  CHECK(run("min[$1; $2](R)", db) == rel(2, {{{1, 2}, 1}, {{2, 7}, 1}}));
  CHECK(run("max[$1; $2](R)", db) == rel(2, {{{1, 5}, 1}, {{2, 7}, 1}}));
  CHECK(run("min[; $2](R)", db) == rel(1, {{{2}, 1}}));
  CHECK(run("max[; $2](R)", db) == rel(1, {{{7}, 1}}));
  CHECK(run("dedup(R)", db) == rel(2, {{{1, 5}, 1}, {{1, 2}, 1}, {{2, 7}, 1}}));

  const IncompleteDatabase empty = db_with("R", BagRelation(2));
  CHECK(run("avg[$1; $2](R)", empty) == BagRelation(2));
  CHECK(run("min[$1; $2](R)", empty) == BagRelation(2));
  CHECK(run("dedup(R)", empty) == BagRelation(2));
}

TEST_CASE("extended selections") {
  const IncompleteDatabase db =
      db_with("R", rel(2, {{{1, 1}, 3}, {{1, 2}, 2}, {{5, 5}, 1}, {{2, 1}, 1}}));
  CHECK(run("select($1 != $2, R)", db) == rel(2, {{{1, 2}, 2}, {{2, 1}, 1}}));
  CHECK(run("select($1 <= $2, R)", db) == rel(2, {{{1, 1}, 3}, {{1, 2}, 2}, {{5, 5}, 1}}));
  CHECK(run("select($1 >= $2, R)", db) == rel(2, {{{1, 1}, 3}, {{5, 5}, 1}, {{2, 1}, 1}}));
  CHECK(run("select($1 + $2 > 2.5, R)", db) == rel(2, {{{1, 2}, 2}, {{5, 5}, 1}, {{2, 1}, 1}}));
  CHECK(run("select($1 * $1 = 25, R)", db) == rel(2, {{{5, 5}, 1}}));

  // or must not double-count the overlap
  CHECK(run("select(($1 < 2 or $1 = $2), R)", db) ==
        rel(2, {{{1, 1}, 3}, {{1, 2}, 2}, {{5, 5}, 1}}));
  CHECK(run("select(($1 < 2 and $1 = $2), R)", db) == rel(2, {{{1, 1}, 3}}));
  CHECK(run("select((not $1 < $2), R)", db) == run("select($1 >= $2, R)", db));

  const IncompleteDatabase db1 = db_with("S", rel(1, {{{0.5}, 2}, {{1}, 1}, {{1.5}, 1}, {{2}, 1}}));
  CHECK(run("select($1 in [1, 2), S)", db1) == rel(1, {{{1}, 1}, {{1.5}, 1}}));
  CHECK(run("select($1 in (1, 2], S)", db1) == rel(1, {{{1.5}, 1}, {{2}, 1}}));
  CHECK(run("select($1 in (-inf, 1], S)", db1) == rel(1, {{{0.5}, 2}, {{1}, 1}}));
  CHECK(run("select($1 in [0.5, +inf), S)", db1) ==
        rel(1, {{{0.5}, 2}, {{1}, 1}, {{1.5}, 1}, {{2}, 1}}));
}

TEST_CASE("naive mode treats nulls as opaque constants") {
  IncompleteDatabase db;
  BagRelation r(1);
  r.add({Value::null(1)}, 2);
  r.add({Value::null(2)}, 1);
  r.add({Value::real(1)}, 1);
  db.relations.emplace("R", r);
  db.annotations.emplace(1, Distribution::normal(0, 1));
  db.annotations.emplace(2, Distribution::normal(0, 1));

  BagRelation consts(1);
  consts.add({Value::real(1)});
  CHECK(run("select(isconst($1), R)", db, EvalMode::Naive) == consts);

  BagRelation dd(1);
  dd.add({Value::null(1)});
  dd.add({Value::null(2)});
  dd.add({Value::real(1)});
  CHECK(run("dedup(R)", db, EvalMode::Naive) == dd);

  // grouping by a null is grouping by its identity
  BagRelation counts(2);
  counts.add({Value::null(1), Value::real(2)});
  counts.add({Value::null(2), Value::real(1)});
  counts.add({Value::real(1), Value::real(1)});
  CHECK(run("count[$1](R)", db, EvalMode::Naive) == counts);

  IncompleteDatabase db2;
  BagRelation r2(2);
  r2.add({Value::null(1), Value::null(1)});
  r2.add({Value::null(1), Value::null(2)});
  db2.relations.emplace("T", r2);
  db2.annotations = db.annotations;
  BagRelation eq(2);
  eq.add({Value::null(1), Value::null(1)});
  CHECK(run("select($1 = $2, T)", db2, EvalMode::Naive) == eq);

  // order and arithmetic over a null are undefined in naive mode
  CHECK_THROWS_AS(run("select($1 < $2, T)", db2, EvalMode::Naive), Error);
  CHECK_THROWS_AS(run("apply($1 + 1, R)", db, EvalMode::Naive), Error);
  CHECK_THROWS_AS(run("sum[; $1](R)", db, EvalMode::Naive), Error);
  // a literal null is a value in naive mode
  BagRelation one_null(1);
  one_null.add({Value::null(1)});
  CHECK(run("bag[1]{(n1)}", db, EvalMode::Naive) == one_null);
}

TEST_CASE("complete mode rejects nulls") {
  IncompleteDatabase db;
  BagRelation r(1);
  r.add({Value::null(1)});
  db.relations.emplace("R", r);
  db.annotations.emplace(1, Distribution::normal(0, 1));
  CHECK_THROWS_AS(run("R", db, EvalMode::Complete), Error);
  CHECK_THROWS_AS(run("bag[1]{(n1)}", IncompleteDatabase{}, EvalMode::Complete), Error);
}

TEST_CASE("sugar equals its core expansion on complete data") {
  const char* queries[] = {
      "dedup(R)",
      "count[$1](R)",
      "count[](R)",
      "sum[$2; $1](R)",
      "avg[$1; $2](R)",
      "min[$1; $2](R)",
      "max[$2; $1](R)",
      "select($1 != $2, R)",
      "select($1 <= $2, R)",
      "select($1 >= $2, R)",
      "select($1 + $2 < 3, R)",
      "select(($1 < 1 or $2 >= 2), R)",
      "select((not ($1 < 1 and $2 < 2)), R)",
      "select($1 in [0, 2), R)",
      "avg[; $2](select($1 != 1, R))",
      "count[$1](dedup(R))",
  };
  RandomStream rng(2024, 0);
  for (int trial = 0; trial < 30; ++trial) {
    BagRelation r(2);
    const std::uint64_t n_rows = rng.next_below(6);
    for (std::uint64_t i = 0; i < n_rows; ++i) {
      // half-integer grid keeps sums exact, so bags must match bit for bit
      const double a = static_cast<double>(rng.next_below(7)) / 2.0 - 1.0;
      const double b = static_cast<double>(rng.next_below(7)) / 2.0 - 1.0;
      r.add(row({a, b}), 1 + rng.next_below(3));
    }
    IncompleteDatabase db = db_with("R", std::move(r));
    const Schema schema = schema_of(db);
    for (const char* s : queries) {
      CAPTURE(trial);
      CAPTURE(s);
      const AstPtr q = query_parse(s);
      // both sides must agree, including on failures (e.g. the grand
      // average of an empty bag is the ratio 0/0)
      auto attempt = [&](const AstPtr& query) -> std::pair<bool, BagRelation> {
        try {
          return {true, eval_query(query, db, EvalMode::Complete)};
        } catch (const Error&) {
          return {false, BagRelation(0)};
        }
      };
      const auto [ok_native, native] = attempt(q);
      const auto [ok_expanded, expanded] = attempt(desugar(q, schema));
      CHECK(ok_native == ok_expanded);
      if (ok_native) CHECK(native == expanded);
    }
  }
}

TEST_CASE("count_consistent") {
  BagRelation answers(2);
  answers.add(row({1, 2}), 2);
  answers.add(row({3, 4}), 1);

  const Valuation none;
  auto iv = [](const char* lo, const char* hi, bool lc, bool hc) {
    IntervalSpec s;
    if (std::string(lo) != "-inf") s.lo = expr_parse(lo);
    if (std::string(hi) != "+inf") s.hi = expr_parse(hi);
    s.lo_closed = lc;
    s.hi_closed = hc;
    return s;
  };

  // empty template: every answer is consistent
  CHECK(count_consistent({}, none, answers) == 3);

  // closed point template
  CHECK(count_consistent({iv("1", "1", true, true), iv("2", "2", true, true)}, none, answers) == 2);
  // half-open: [1, 3) x anything
  CHECK(count_consistent({iv("1", "3", true, false), iv("-inf", "+inf", false, false)}, none,
                         answers) == 2);
  // open lower bound excludes the endpoint
  CHECK(count_consistent({iv("1", "3", false, false), iv("-inf", "+inf", false, false)}, none,
                         answers) == 0);
  // expression endpoints are grounded by the valuation
  const Valuation v{{7, 2.5}};
  CHECK(count_consistent({iv("-inf", "n7", false, false), iv("-inf", "+inf", false, false)}, v,
                         answers) == 2);
  CHECK(count_consistent({iv("n7", "+inf", true, false), iv("-inf", "+inf", false, false)}, v,
                         answers) == 1);
  // a template of the wrong width is a type error
  CHECK_THROWS_AS(count_consistent({iv("0", "1", true, true)}, none, answers), Error);
  // ungrounded endpoint nulls are missing bindings
  CHECK_THROWS_AS(count_consistent({iv("-inf", "n9", false, false),
                                    iv("-inf", "+inf", false, false)},
                                   none, answers),
                  Error);
}

TEST_CASE("evaluation through the json loader") {
  const IncompleteDatabase db = db_from_json(R"({
    "relations": {
      "R": {"arity": 2, "tuples": [[1, 1], [1, {"null": 1}]], "multiplicities": [1, 1]}
    },
    "nulls": {"1": {"kind": "normal", "mu": 2.0, "sigma": 0.5}}
  })");
  const Valuation v{{1, 3.0}};
  const IncompleteDatabase ground = apply_valuation(v, db);
  CHECK(run("sum[$1; $2](select($2 >= 2, R))", ground) == rel(2, {{{1, 3}, 1}}));
  const Valuation low{{1, 1.0}};
  CHECK(run("sum[$1; $2](select($2 >= 2, R))", apply_valuation(low, db)) == BagRelation(2));
}
