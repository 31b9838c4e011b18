#pragma once

#include <map>
#include <optional>

#include "nulldb/expr.hpp"

namespace nulldb {

// Sparse multivariate polynomials over nulls, and ratios of them, in a
// canonical normal form: terms sorted by monomial, zero coefficients
// dropped, denominator scaled so its leading coefficient is 1, and the
// zero function represented as 0/1.  Two expressions denote the same
// rational function iff their canonical forms are identical, which is
// what lets condition sets and symbolic tuples be compared structurally.
using Monomial = std::map<NullId, unsigned>; // exponent > 0 only

struct Polynomial {
  std::map<Monomial, double> terms;

  static Polynomial constant(double c);
  static Polynomial variable(NullId id);
  bool is_zero() const { return terms.empty(); }
  std::optional<double> as_const() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms == b.terms; }
};

struct RationalFn {
  Polynomial num;
  Polynomial den; // never the zero polynomial; leading coefficient 1

  static RationalFn make(Polynomial n, Polynomial d);
  static RationalFn constant(double c) { return make(Polynomial::constant(c), Polynomial::constant(1.0)); }

  std::optional<double> as_const() const;

  friend RationalFn operator+(const RationalFn& a, const RationalFn& b);
  friend RationalFn operator-(const RationalFn& a, const RationalFn& b);
  friend RationalFn operator*(const RationalFn& a, const RationalFn& b);
  friend RationalFn operator/(const RationalFn& a, const RationalFn& b);
  friend bool operator==(const RationalFn& a, const RationalFn& b) {
    return a.num == b.num && a.den == b.den;
  }
};

// Expression over nulls only (no attributes) -> canonical form.
RationalFn rational_from_expr(const ExprPtr& e);
// Canonical expression tree for the form; rebuilding the same form
// always yields a structurally identical tree.
ExprPtr rational_to_expr(const RationalFn& r);

// normalize = to_expr(from_expr(e)); idempotent.
ExprPtr canonicalize_expr(const ExprPtr& e);
ExprPtr canonical_negate(const ExprPtr& canonical);

} // namespace nulldb
