// Values, distributions, counter RNG, bag relations, databases.
#include <doctest.h>

#include <cmath>
#include <limits>

#include "nulldb/database.hpp"
#include "nulldb/rng.hpp"

using namespace nulldb;

TEST_CASE("values: reals and nulls") {
  const Value a = Value::real(1.5);
  const Value b = Value::real(1.5);
  const Value c = Value::real(2.0);
  const Value n1 = Value::null(1);
  const Value n2 = Value::null(2);

  CHECK(a == b);
  CHECK(a != c);
  CHECK(n1 == Value::null(1));
  CHECK(n1 != n2);
  CHECK(a != n1);

  CHECK(a.is_real());
  CHECK(n1.is_null());
  CHECK(a.as_real() == 1.5);
  CHECK(n1.null_id() == 1);
  CHECK_THROWS_AS(n1.as_real(), Error);

  // canonical order: reals before nulls
  CHECK(a < c);
  CHECK(c < n1);
  CHECK(n1 < n2);
  CHECK_FALSE(n1 < a);

  CHECK(n1.str() == "n1");

  CHECK_THROWS_AS(Value::real(std::numeric_limits<double>::infinity()), Error);
  CHECK_THROWS_AS(Value::real(std::nan("")), Error);
}

TEST_CASE("distribution factories validate parameters") {
  CHECK_THROWS_AS(Distribution::normal(0.0, 0.0), Error);
  CHECK_THROWS_AS(Distribution::normal(0.0, -1.0), Error);
  CHECK_THROWS_AS(Distribution::uniform(1.0, 1.0), Error);
  CHECK_THROWS_AS(Distribution::uniform(2.0, 1.0), Error);
  CHECK_THROWS_AS(Distribution::exponential(0.0), Error);
  CHECK_THROWS_AS(Distribution::exponential(-2.0), Error);
  CHECK(Distribution::normal(0, 1) == Distribution::normal(0, 1));
  CHECK_FALSE(Distribution::normal(0, 1) == Distribution::uniform(0, 1));
}

TEST_CASE("distribution cdf against closed forms") {
  const Distribution n01 = Distribution::normal(0, 1);
  CHECK(dist_cdf(n01, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dist_cdf(n01, 1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(dist_cdf(n01, 3.0) == doctest::Approx(0.9986501019683699).epsilon(1e-14));
  CHECK(dist_cdf(n01, -1.96) == doctest::Approx(0.024997895148220435).epsilon(1e-13));

  const Distribution n25 = Distribution::normal(2, 0.5);
  CHECK(dist_cdf(n25, 3.0) == doctest::Approx(0.9772498680518208).epsilon(1e-14));
  CHECK(dist_cdf(n25, 2.0) == doctest::Approx(0.5).epsilon(1e-15));

  const Distribution u02 = Distribution::uniform(0, 2);
  CHECK(dist_cdf(u02, -1.0) == 0.0);
  CHECK(dist_cdf(u02, 0.0) == 0.0);
  CHECK(dist_cdf(u02, 1.0) == 0.5);
  CHECK(dist_cdf(u02, 2.0) == 1.0);
  CHECK(dist_cdf(u02, 3.0) == 1.0);

  const Distribution e1 = Distribution::exponential(1);
  CHECK(dist_cdf(e1, -1.0) == 0.0);
  CHECK(dist_cdf(e1, 1.0) == doctest::Approx(0.6321205588285577).epsilon(1e-15));
  const Distribution e2 = Distribution::exponential(2);
  CHECK(dist_cdf(e2, 1.0) == doctest::Approx(0.8646647167633873).epsilon(1e-15));
}

TEST_CASE("distribution quantile against closed forms") {
  const Distribution n01 = Distribution::normal(0, 1);
  CHECK(dist_quantile(n01, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(dist_quantile(n01, 0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(dist_quantile(n01, 0.8413447460685429) == doctest::Approx(1.0).epsilon(1e-12));

  const Distribution n25 = Distribution::normal(2, 0.5);
  CHECK(dist_quantile(n25, 0.8413447460685429) == doctest::Approx(2.5).epsilon(1e-12));

  const Distribution u02 = Distribution::uniform(0, 2);
  CHECK(dist_quantile(u02, 0.25) == doctest::Approx(0.5).epsilon(1e-15));

  const Distribution e1 = Distribution::exponential(1);
  CHECK(dist_quantile(e1, 0.5) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  const Distribution e2 = Distribution::exponential(2);
  CHECK(dist_quantile(e2, 0.25) == doctest::Approx(0.14384103622589045).epsilon(1e-15));

  CHECK_THROWS_AS(dist_quantile(n01, 0.0), Error);
  CHECK_THROWS_AS(dist_quantile(n01, 1.0), Error);
  CHECK_THROWS_AS(dist_quantile(n01, -0.5), Error);
}

TEST_CASE("quantile inverts cdf across the support") {
  for (const Distribution& d : {Distribution::normal(-1, 2), Distribution::uniform(-3, 5),
                                Distribution::exponential(0.7)}) {
    for (int i = 1; i < 40; ++i) {
      const double p = i / 40.0;
      CHECK(dist_cdf(d, dist_quantile(d, p)) == doctest::Approx(p).epsilon(1e-10));
    }
  }
}

TEST_CASE("counter rng: determinism and stream separation") {
  CHECK(counter_u01(1, 2, 3) == counter_u01(1, 2, 3));
  CHECK(counter_u01(1, 2, 3) != counter_u01(1, 2, 4));
  CHECK(counter_u01(1, 2, 3) != counter_u01(1, 3, 3));
  CHECK(counter_u01(1, 2, 3) != counter_u01(2, 2, 3));

  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = counter_u01(42, 7, i);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }

  RandomStream s(9, 4);
  const double first = s.next_u01();
  RandomStream t(9, 4);
  CHECK(t.next_u01() == first);
  CHECK(s.next_u01() != first); // counter advanced

  // rough uniformity: mean of many draws near 1/2
  RandomStream u(5, 0);
  double acc = 0.0;
  for (int i = 0; i < 20000; ++i) acc += u.next_u01();
  CHECK(acc / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("null_draw is the shared draw between sampler and compiler") {
  const Distribution d = Distribution::exponential(1);
  const double x = null_draw(d, 11, 3, 1);
  CHECK(x == null_draw(d, 11, 3, 1));
  CHECK(x == dist_quantile(d, counter_u01(11, 3, 1)));
  CHECK(x != null_draw(d, 11, 3, 2));
  CHECK(x > 0.0); // support of the exponential
}

TEST_CASE("bag relations: multiplicity bookkeeping") {
  BagRelation r(2);
  const Tuple t1 = {Value::real(1), Value::real(2)};
  const Tuple t2 = {Value::real(1), Value::null(4)};
  r.add(t1);
  r.add(t1, 2);
  r.add(t2, 5);

  CHECK(r.arity() == 2);
  CHECK(r.distinct_count() == 2);
  CHECK(r.multiplicity(t1) == 3);
  CHECK(r.multiplicity(t2) == 5);
  CHECK(r.multiplicity({Value::real(9), Value::real(9)}) == 0);
  CHECK(r.total() == 8);

  BagRelation s(2);
  s.add(t2, 5);
  s.add(t1, 3);
  CHECK(r == s); // order of insertion is irrelevant

  CHECK_THROWS_AS(r.add({Value::real(1)}), Error);       // arity mismatch
  r.add(t1, 0);                                          // adding nothing is a no-op
  CHECK(r.multiplicity(t1) == 3);
  BagRelation o(1);
  o.add({Value::real(0)}, std::numeric_limits<std::uint64_t>::max());
  CHECK_THROWS_AS(o.add({Value::real(0)}, 1), Error);    // overflow
}

TEST_CASE("database validation ties annotations to used nulls") {
  IncompleteDatabase db;
  BagRelation r(1);
  r.add({Value::null(1)});
  db.relations.emplace("R", r);

  CHECK_THROWS_AS(db.validate(), Error); // n1 unannotated
  db.annotations.emplace(1, Distribution::exponential(1));
  CHECK_NOTHROW(db.validate());
  db.annotations.emplace(2, Distribution::exponential(1));
  CHECK_THROWS_AS(db.validate(), Error); // n2 annotated but unused

  db.annotations.erase(2);
  CHECK_FALSE(db.complete());
  CHECK(db.nulls_used() == std::set<NullId>{1});

  IncompleteDatabase empty;
  CHECK(empty.complete());
  CHECK_NOTHROW(empty.validate());
}

TEST_CASE("apply_valuation merges rows that collapse") {
  BagRelation r(1);
  r.add({Value::null(1)}, 2);
  r.add({Value::real(1.0)}, 3);
  IncompleteDatabase db;
  db.relations.emplace("R", r);
  db.annotations.emplace(1, Distribution::uniform(0, 2));

  const Valuation v{{1, 1.0}};
  const IncompleteDatabase out = apply_valuation(v, db);
  const BagRelation& s = out.relations.at("R");
  CHECK(s.distinct_count() == 1);
  CHECK(s.multiplicity({Value::real(1.0)}) == 5);
  CHECK(out.complete());
  CHECK(out.annotations.empty());

  CHECK_THROWS_AS(apply_valuation(Valuation{}, db), Error); // missing binding
}

TEST_CASE("sample_valuation is deterministic and respects supports") {
  IncompleteDatabase db;
  BagRelation r(2);
  r.add({Value::null(1), Value::null(5)});
  db.relations.emplace("R", r);
  db.annotations.emplace(1, Distribution::uniform(10, 11));
  db.annotations.emplace(5, Distribution::exponential(3));

  const Valuation v1 = sample_valuation(db, 99, 1);
  const Valuation v2 = sample_valuation(db, 99, 1);
  CHECK(v1 == v2);
  CHECK(v1.size() == 2);
  CHECK(v1.at(1) > 10.0);
  CHECK(v1.at(1) < 11.0);
  CHECK(v1.at(5) > 0.0);
  CHECK(v1.at(1) == null_draw(Distribution::uniform(10, 11), 99, 1, 1));
  CHECK(v1.at(5) == null_draw(Distribution::exponential(3), 99, 5, 1));
  CHECK(sample_valuation(db, 99, 2) != v1);
  CHECK(sample_valuation(db, 98, 1) != v1);
}
