#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nulldb/value.hpp"

namespace nulldb {

// Ratio-of-polynomials expression over attribute positions ($1, $2, ...)
// and marked nulls (n1, n2, ...).  Immutable, shared by pointer.
struct RatExpr;
using ExprPtr = std::shared_ptr<const RatExpr>;

struct RatExpr {
  enum class Kind { Const, Attr, NullVar, Add, Sub, Mul, Div };
  Kind kind;
  double value = 0.0; // Const
  int attr = 0;       // Attr position, 1-based
  NullId null_id = 0; // NullVar
  ExprPtr lhs, rhs;   // binary nodes
};

ExprPtr expr_const(double v);
ExprPtr expr_attr(int pos);
ExprPtr expr_null(NullId id);
ExprPtr expr_add(ExprPtr a, ExprPtr b);
ExprPtr expr_sub(ExprPtr a, ExprPtr b);
ExprPtr expr_mul(ExprPtr a, ExprPtr b);
ExprPtr expr_div(ExprPtr a, ExprPtr b);
// 0 - e, printed and parsed as unary minus.
ExprPtr expr_neg(ExprPtr e);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);
// Total order compatible with expr_equal, for use as a map key.
bool expr_less(const ExprPtr& a, const ExprPtr& b);

struct ExprLess {
  bool operator()(const ExprPtr& a, const ExprPtr& b) const { return expr_less(a, b); }
};

struct ExprFreeVars {
  std::set<int> attrs;
  std::set<NullId> nulls;
};
ExprFreeVars expr_free_vars(const ExprPtr& e);
// Largest attribute position referenced, 0 if none.
int expr_max_attr(const ExprPtr& e);

// Bindings for evaluation.  Either map may be left empty when the
// expression does not use that variable class.
struct ExprEnv {
  const std::vector<double>* attrs = nullptr; // position i binds attrs[i-1]
  const std::map<NullId, double>* nulls = nullptr;
};

// Evaluates to a finite double; DivByZero when a denominator is exactly
// 0.0, UnboundVariable / MissingNull when a variable has no binding.
double expr_eval(const ExprPtr& e, const ExprEnv& env);

// Replaces NullVar nodes by constants from v; nulls absent from v stay
// symbolic.
ExprPtr expr_ground_nulls(const ExprPtr& e, const std::map<NullId, double>& v);
// Replaces Attr(i) by args[i-1]; every referenced position must be bound.
ExprPtr expr_subst_attrs(const ExprPtr& e, const std::vector<ExprPtr>& args);

std::string expr_print(const ExprPtr& e);
// Parses the textual syntax produced by expr_print ($k, n<k>, infix
// + - * / with unary minus, decimal and exponent literals).
ExprPtr expr_parse(const std::string& text);

} // namespace nulldb
