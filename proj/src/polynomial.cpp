#include "nulldb/polynomial.hpp"

namespace nulldb {

Polynomial Polynomial::constant(double c) {
  Polynomial p;
  if (c != 0.0) p.terms[Monomial{}] = c;
  return p;
}

Polynomial Polynomial::variable(NullId id) {
  Polynomial p;
  p.terms[Monomial{{id, 1u}}] = 1.0;
  return p;
}

std::optional<double> Polynomial::as_const() const {
  if (terms.empty()) return 0.0;
  if (terms.size() == 1 && terms.begin()->first.empty()) return terms.begin()->second;
  return std::nullopt;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial out = a;
  for (const auto& [mono, c] : b.terms) {
    double& slot = out.terms[mono];
    slot += c;
    if (slot == 0.0) out.terms.erase(mono);
  }
  return out;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  Polynomial out = a;
  for (const auto& [mono, c] : b.terms) {
    double& slot = out.terms[mono];
    slot -= c;
    if (slot == 0.0) out.terms.erase(mono);
  }
  return out;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms)
    for (const auto& [mb, cb] : b.terms) {
      Monomial m = ma;
      for (const auto& [var, exp] : mb) m[var] += exp;
      double& slot = out.terms[m];
      slot += ca * cb;
      if (slot == 0.0) out.terms.erase(m);
    }
  return out;
}

RationalFn RationalFn::make(Polynomial n, Polynomial d) {
  if (d.is_zero()) fail(ErrKind::DivByZero, "division by the zero polynomial");
  if (n.is_zero()) return {Polynomial{}, Polynomial::constant(1.0)};
  // Scale so the denominator's leading (last in term order) coefficient is 1.
  const double lead = d.terms.rbegin()->second;
  if (lead != 1.0) {
    for (auto& [m, c] : n.terms) c /= lead;
    for (auto& [m, c] : d.terms) c /= lead;
    d.terms.rbegin()->second = 1.0;
  }
  return {std::move(n), std::move(d)};
}

std::optional<double> RationalFn::as_const() const {
  auto n = num.as_const();
  auto d = den.as_const();
  if (n && d) return *n / *d; // den is never zero
  return std::nullopt;
}

RationalFn operator+(const RationalFn& a, const RationalFn& b) {
  return RationalFn::make(a.num * b.den + b.num * a.den, a.den * b.den);
}
RationalFn operator-(const RationalFn& a, const RationalFn& b) {
  return RationalFn::make(a.num * b.den - b.num * a.den, a.den * b.den);
}
RationalFn operator*(const RationalFn& a, const RationalFn& b) {
  return RationalFn::make(a.num * b.num, a.den * b.den);
}
RationalFn operator/(const RationalFn& a, const RationalFn& b) {
  if (b.num.is_zero()) fail(ErrKind::DivByZero, "division by the zero polynomial");
  return RationalFn::make(a.num * b.den, a.den * b.num);
}

RationalFn rational_from_expr(const ExprPtr& e) {
  switch (e->kind) {
    case RatExpr::Kind::Const: return RationalFn::constant(e->value);
    case RatExpr::Kind::Attr:
      fail(ErrKind::Type, "attribute $" + std::to_string(e->attr) + " in a null-only expression");
    case RatExpr::Kind::NullVar:
      return RationalFn::make(Polynomial::variable(e->null_id), Polynomial::constant(1.0));
    case RatExpr::Kind::Add: return rational_from_expr(e->lhs) + rational_from_expr(e->rhs);
    case RatExpr::Kind::Sub: return rational_from_expr(e->lhs) - rational_from_expr(e->rhs);
    case RatExpr::Kind::Mul: return rational_from_expr(e->lhs) * rational_from_expr(e->rhs);
    case RatExpr::Kind::Div: return rational_from_expr(e->lhs) / rational_from_expr(e->rhs);
  }
  fail(ErrKind::Internal, "bad expression kind");
}

namespace {

ExprPtr monomial_to_expr(const Monomial& m, double coeff_abs) {
  ExprPtr acc;
  if (coeff_abs != 1.0 || m.empty()) acc = expr_const(coeff_abs);
  for (const auto& [var, exp] : m)
    for (unsigned i = 0; i < exp; ++i) {
      ExprPtr v = expr_null(var);
      acc = acc ? expr_mul(std::move(acc), std::move(v)) : std::move(v);
    }
  return acc;
}

ExprPtr poly_to_expr(const Polynomial& p) {
  if (p.terms.empty()) return expr_const(0.0);
  ExprPtr acc;
  for (const auto& [mono, coeff] : p.terms) {
    ExprPtr term = monomial_to_expr(mono, std::fabs(coeff));
    if (!acc)
      acc = coeff < 0.0 ? expr_neg(std::move(term)) : std::move(term);
    else if (coeff < 0.0)
      acc = expr_sub(std::move(acc), std::move(term));
    else
      acc = expr_add(std::move(acc), std::move(term));
  }
  return acc;
}

} // namespace

ExprPtr rational_to_expr(const RationalFn& r) {
  ExprPtr num = poly_to_expr(r.num);
  auto d = r.den.as_const();
  if (d && *d == 1.0) return num;
  return expr_div(std::move(num), poly_to_expr(r.den));
}

ExprPtr canonicalize_expr(const ExprPtr& e) { return rational_to_expr(rational_from_expr(e)); }

ExprPtr canonical_negate(const ExprPtr& canonical) {
  RationalFn r = rational_from_expr(canonical);
  return rational_to_expr(RationalFn::make(Polynomial{} - r.num, r.den));
}

} // namespace nulldb
