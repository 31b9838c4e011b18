#include "nulldb/ast.hpp"

namespace nulldb {

std::string format_double(double v); // expr.cpp

namespace {

void print_poslist(const std::vector<int>& ps, std::string& out) {
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ", ";
    out += "$" + std::to_string(ps[i]);
  }
}

void print_bound(const ExprPtr& e, bool lo, std::string& out) {
  if (!e)
    out += lo ? "-inf" : "+inf";
  else
    out += expr_print(e);
}

void print_cond(const CondPtr& c, std::string& out) {
  switch (c->kind) {
    case Condition::Kind::Eq:
      out += "$" + std::to_string(c->i) + " = $" + std::to_string(c->j);
      return;
    case Condition::Kind::Lt:
      out += "$" + std::to_string(c->i) + " < $" + std::to_string(c->j);
      return;
    case Condition::Kind::IsConst:
      out += "isconst($" + std::to_string(c->i) + ")";
      return;
    case Condition::Kind::Cmp: {
      const char* op = c->op == CmpOp::Eq   ? " = "
                       : c->op == CmpOp::Ne ? " != "
                       : c->op == CmpOp::Lt ? " < "
                       : c->op == CmpOp::Gt ? " > "
                       : c->op == CmpOp::Le ? " <= "
                                            : " >= ";
      out += expr_print(c->lhs) + op + expr_print(c->rhs);
      return;
    }
    case Condition::Kind::IntervalMember:
      out += "$" + std::to_string(c->i) + " in ";
      out += c->interval.lo_closed && !c->interval.lo_infinite() ? "[" : "(";
      print_bound(c->interval.lo, true, out);
      out += ", ";
      print_bound(c->interval.hi, false, out);
      out += c->interval.hi_closed && !c->interval.hi_infinite() ? "]" : ")";
      return;
    case Condition::Kind::And:
      out += "(";
      print_cond(c->a, out);
      out += " and ";
      print_cond(c->b, out);
      out += ")";
      return;
    case Condition::Kind::Or:
      out += "(";
      print_cond(c->a, out);
      out += " or ";
      print_cond(c->b, out);
      out += ")";
      return;
    case Condition::Kind::Not:
      out += "(not ";
      print_cond(c->a, out);
      out += ")";
      return;
  }
}

void print_query(const AstPtr& q, std::string& out) {
  switch (q->kind) {
    case OpKind::Base:
      out += q->base_name;
      return;
    case OpKind::Literal: {
      out += "bag[" + std::to_string(q->literal.arity) + "]{";
      bool first_row = true;
      for (const LiteralRow& row : q->literal.rows) {
        if (!first_row) out += ", ";
        first_row = false;
        out += "(";
        for (std::size_t i = 0; i < row.entries.size(); ++i) {
          if (i) out += ", ";
          out += expr_print(row.entries[i]);
        }
        out += ")";
        if (row.mult != 1) out += "*" + std::to_string(row.mult);
      }
      out += "}";
      return;
    }
    case OpKind::Project:
      out += "project[";
      print_poslist(q->positions, out);
      out += "](";
      print_query(q->left, out);
      out += ")";
      return;
    case OpKind::Select:
      out += "select(";
      print_cond(q->condition, out);
      out += ", ";
      print_query(q->left, out);
      out += ")";
      return;
    case OpKind::Product:
    case OpKind::UnionAll:
    case OpKind::ExceptAll: {
      const char* op = q->kind == OpKind::Product ? " * " : q->kind == OpKind::UnionAll ? " + " : " \\ ";
      out += "(";
      print_query(q->left, out);
      out += op;
      print_query(q->right, out);
      out += ")";
      return;
    }
    case OpKind::Apply:
      out += "apply(";
      out += expr_print(q->fn);
      out += ", ";
      print_query(q->left, out);
      out += ")";
      return;
    case OpKind::SumGroup:
    case OpKind::Avg:
    case OpKind::Min:
    case OpKind::Max: {
      out += q->kind == OpKind::SumGroup ? "sum["
             : q->kind == OpKind::Avg   ? "avg["
             : q->kind == OpKind::Min   ? "min["
                                        : "max[";
      print_poslist(q->positions, out);
      out += "; $" + std::to_string(q->agg_pos) + "](";
      print_query(q->left, out);
      out += ")";
      return;
    }
    case OpKind::Count:
      out += "count[";
      print_poslist(q->positions, out);
      out += "](";
      print_query(q->left, out);
      out += ")";
      return;
    case OpKind::Dedup:
      out += "dedup(";
      print_query(q->left, out);
      out += ")";
      return;
  }
}

} // namespace

std::string query_print(const AstPtr& q) {
  std::string out;
  print_query(q, out);
  return out;
}

std::string cond_print(const CondPtr& c) {
  std::string out;
  print_cond(c, out);
  return out;
}

} // namespace nulldb
