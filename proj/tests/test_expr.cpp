// Arithmetic expressions and their canonical rational-function form.
#include <doctest.h>

#include "nulldb/polynomial.hpp"

using namespace nulldb;

namespace {
double eval_n(const ExprPtr& e, const std::map<NullId, double>& nulls) {
  ExprEnv env;
  env.nulls = &nulls;
  return expr_eval(e, env);
}
double eval_a(const ExprPtr& e, const std::vector<double>& attrs) {
  ExprEnv env;
  env.attrs = &attrs;
  return expr_eval(e, env);
}
} // namespace

TEST_CASE("expression construction and evaluation") {
  // ($1 + 2) * $2
  const ExprPtr e = expr_mul(expr_add(expr_attr(1), expr_const(2)), expr_attr(2));
  CHECK(eval_a(e, {3, 4}) == 20.0);
  CHECK(expr_max_attr(e) == 2);

  const ExprPtr f = expr_div(expr_null(1), expr_sub(expr_null(2), expr_const(1)));
  CHECK(eval_n(f, {{1, 6.0}, {2, 4.0}}) == 2.0);
  CHECK_THROWS_AS(eval_n(f, {{1, 6.0}, {2, 1.0}}), Error); // division by zero
  CHECK_THROWS_AS(eval_n(f, {{1, 6.0}}), Error);           // n2 unbound

  CHECK_THROWS_AS(eval_a(e, {3}), Error); // $2 unbound
  CHECK_THROWS_AS(expr_const(1.0 / 0.0), Error);

  const ExprFreeVars fv = expr_free_vars(expr_add(e, f));
  CHECK(fv.attrs == std::set<int>{1, 2});
  CHECK(fv.nulls == std::set<NullId>{1, 2});
}

TEST_CASE("expr_neg folds constants") {
  CHECK(expr_neg(expr_const(3))->kind == RatExpr::Kind::Const);
  CHECK(expr_neg(expr_const(3))->value == -3.0);
  const ExprPtr m = expr_neg(expr_null(1));
  CHECK(eval_n(m, {{1, 2.5}}) == -2.5);
}

TEST_CASE("substitution") {
  // grounding nulls
  const ExprPtr e = expr_add(expr_null(1), expr_mul(expr_null(2), expr_attr(1)));
  const ExprPtr g = expr_ground_nulls(e, {{1, 10.0}});
  CHECK(expr_free_vars(g).nulls == std::set<NullId>{2});
  const ExprPtr g2 = expr_ground_nulls(g, {{2, 3.0}});
  CHECK(expr_free_vars(g2).nulls.empty());
  CHECK(eval_a(g2, {4.0}) == 22.0);
  CHECK_THROWS_AS(eval_n(g2, {}), Error); // $1 still free
  // attribute substitution
  const ExprPtr s = expr_subst_attrs(expr_add(expr_attr(1), expr_attr(2)),
                                     {expr_const(5), expr_null(7)});
  CHECK(eval_n(s, {{7, 2.0}}) == 7.0);
  CHECK_THROWS_AS(expr_subst_attrs(expr_attr(3), {expr_const(1)}), Error);
}

TEST_CASE("printing and parsing round-trip") {
  const char* cases[] = {
      "1",
      "-1",
      "(1 + 2)",
      "((1 + 2) * 3)",
      "($1 / $2)",
      "(n1 - n2)",
      "((n1 * n1) - 0.5)",
      "-n3",
      "(2.5e-10 + $4)",
  };
  for (const char* s : cases) {
    const ExprPtr e = expr_parse(s);
    const std::string printed = expr_print(e);
    CHECK(expr_equal(expr_parse(printed), e));
  }
  // precedence: * binds tighter than +
  CHECK(eval_n(expr_parse("1 + 2 * 3"), {}) == 7.0);
  CHECK(eval_n(expr_parse("(1 + 2) * 3"), {}) == 9.0);
  CHECK(eval_n(expr_parse("2 - 3 - 4"), {}) == -5.0); // left assoc
  CHECK(eval_n(expr_parse("-2 * 3"), {}) == -6.0);
  CHECK(eval_n(expr_parse("8 / 2 / 2"), {}) == 2.0);

  CHECK_THROWS_AS(expr_parse(""), Error);
  CHECK_THROWS_AS(expr_parse("1 +"), Error);
  CHECK_THROWS_AS(expr_parse("(1"), Error);
  CHECK_THROWS_AS(expr_parse("1 2"), Error);
}

TEST_CASE("expression total order") {
  const ExprPtr a = expr_const(1);
  const ExprPtr b = expr_const(2);
  const ExprPtr n = expr_null(1);
  CHECK(expr_less(a, b));
  CHECK_FALSE(expr_less(b, a));
  CHECK_FALSE(expr_less(a, a));
  // strict weak ordering: equal expressions are unordered
  const ExprPtr n2 = expr_null(1);
  CHECK_FALSE(expr_less(n, n2));
  CHECK_FALSE(expr_less(n2, n));
  CHECK(expr_equal(n, n2));
}

TEST_CASE("polynomial arithmetic") {
  const Polynomial x = Polynomial::variable(1);
  const Polynomial one = Polynomial::constant(1);
  // (x+1)*(x-1) == x^2 - 1
  const Polynomial p = (x + one) * (x - one);
  Polynomial x2 = x * x;
  CHECK(p == x2 - one);
  CHECK((x - x).is_zero());
  CHECK(Polynomial::constant(0).is_zero());
  CHECK(p.as_const() == std::nullopt);
  CHECK((one + one).as_const() == 2.0);
}

TEST_CASE("rational normalization") {
  // identical functions get identical canonical forms
  const ExprPtr a = expr_parse("(n1 + 1) * (n1 - 1)");
  const ExprPtr b = expr_parse("n1 * n1 - 1");
  CHECK(expr_equal(canonicalize_expr(a), canonicalize_expr(b)));

  // scaling cancels: (2*n1)/(2*n2) == n1/n2
  const ExprPtr c = expr_parse("(2 * n1) / (2 * n2)");
  const ExprPtr d = expr_parse("n1 / n2");
  CHECK(expr_equal(canonicalize_expr(c), canonicalize_expr(d)));

  // canonicalization is idempotent
  const ExprPtr once = canonicalize_expr(a);
  CHECK(expr_equal(canonicalize_expr(once), once));

  // the zero function is 0 regardless of how it was written
  CHECK(expr_equal(canonicalize_expr(expr_parse("n1 - n1")), expr_const(0)));

  // syntactic zero denominator is rejected
  CHECK_THROWS_AS(rational_from_expr(expr_parse("n1 / (n2 - n2)")), Error);
  // attributes have no place in null-space expressions
  CHECK_THROWS_AS(rational_from_expr(expr_parse("$1 + n1")), Error);
}

TEST_CASE("canonical forms evaluate like the original") {
  const char* cases[] = {
      "n1 * n2 + 3 * n1 - (n2 / 2)",
      "(n1 + n2) * (n1 - n2)",
      "n1 / (n2 + 5)",
      "(n1 * n1 * n2 - 1) / (2 * n2)",
  };
  const std::map<NullId, double> v{{1, 1.7}, {2, -0.3}};
  for (const char* s : cases) {
    const ExprPtr e = expr_parse(s);
    CHECK(eval_n(canonicalize_expr(e), v) == doctest::Approx(eval_n(e, v)).epsilon(1e-12));
  }
}

TEST_CASE("canonical_negate") {
  const ExprPtr e = canonicalize_expr(expr_parse("n1 - 7"));
  const ExprPtr ne = canonical_negate(e);
  CHECK(eval_n(ne, {{1, 3.0}}) == 4.0);
  // negating twice returns the identical tree
  CHECK(expr_equal(canonical_negate(ne), e));
  // negation of a ratio flips only the numerator (denominator stays monic)
  const ExprPtr r = canonicalize_expr(expr_parse("n1 / n2"));
  const ExprPtr nr = canonical_negate(r);
  CHECK(eval_n(nr, {{1, 6.0}, {2, 2.0}}) == -3.0);
  CHECK(expr_equal(nr, canonicalize_expr(expr_parse("(0 - n1) / n2"))));
}
