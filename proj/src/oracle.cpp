#include "nulldb/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace nulldb {

namespace {

bool compare_count(std::uint64_t count, Comparison cmp, std::uint64_t k) {
  switch (cmp) {
    case Comparison::Less: return count < k;
    case Comparison::Equal: return count == k;
    case Comparison::Greater: return count > k;
  }
  fail(ErrKind::Internal, "bad comparison");
}

[[noreturn]] void not_cells(const std::string& why) {
  fail(ErrKind::NotCellDecomposable, "exact cell oracle cannot handle this query: " + why);
}

// Static analysis: tracks which output columns can still hold a null and
// collects every constant the query compares values against.
struct CellAnalysis {
  const IncompleteDatabase& db;
  std::vector<double>& consts;

  std::optional<double> const_of(const ExprPtr& e) {
    ExprFreeVars fv = expr_free_vars(e);
    if (!fv.attrs.empty() || !fv.nulls.empty()) return std::nullopt;
    ExprEnv env;
    return expr_eval(e, env);
  }

  void check_cond(const CondPtr& c, const std::vector<bool>& nullable) {
    switch (c->kind) {
      case Condition::Kind::Eq:
      case Condition::Kind::IsConst:
        return;
      case Condition::Kind::Lt:
        if (nullable[c->i - 1] && nullable[c->j - 1])
          not_cells("order comparison between two columns that may hold nulls");
        return;
      case Condition::Kind::Cmp: {
        const bool l_attr = c->lhs->kind == RatExpr::Kind::Attr;
        const bool r_attr = c->rhs->kind == RatExpr::Kind::Attr;
        auto lc = const_of(c->lhs);
        auto rc = const_of(c->rhs);
        if (l_attr && r_attr) {
          const bool order = c->op != CmpOp::Eq && c->op != CmpOp::Ne;
          if (order && nullable[c->lhs->attr - 1] && nullable[c->rhs->attr - 1])
            not_cells("order comparison between two columns that may hold nulls");
          return;
        }
        if (l_attr && rc) {
          consts.push_back(*rc);
          return;
        }
        if (r_attr && lc) {
          consts.push_back(*lc);
          return;
        }
        if (lc && rc) {
          consts.push_back(*lc);
          consts.push_back(*rc);
          return;
        }
        not_cells("comparison with a computed operand");
      }
      case Condition::Kind::IntervalMember: {
        const IntervalSpec& s = c->interval;
        for (const ExprPtr& b : {s.lo, s.hi}) {
          if (!b) continue;
          auto v = const_of(b);
          if (!v) not_cells("interval bound is not a constant");
          consts.push_back(*v);
        }
        return;
      }
      case Condition::Kind::And:
      case Condition::Kind::Or:
        check_cond(c->a, nullable);
        check_cond(c->b, nullable);
        return;
      case Condition::Kind::Not:
        check_cond(c->a, nullable);
        return;
    }
  }

  std::vector<bool> run(const AstPtr& q) {
    switch (q->kind) {
      case OpKind::Base: {
        auto it = db.relations.find(q->base_name);
        if (it == db.relations.end()) fail(ErrKind::Type, "unknown relation " + q->base_name);
        std::vector<bool> nullable(it->second.arity(), false);
        for (const auto& [t, m] : it->second.rows())
          for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i].is_null())
              nullable[i] = true;
            else
              consts.push_back(t[i].as_real());
          }
        return nullable;
      }
      case OpKind::Literal: {
        for (const LiteralRow& row : q->literal.rows)
          for (const ExprPtr& e : row.entries) {
            auto v = const_of(e);
            if (!v) not_cells("literal with non-constant entries");
            consts.push_back(*v);
          }
        return std::vector<bool>(q->literal.arity, false);
      }
      case OpKind::Project: {
        std::vector<bool> in = run(q->left);
        std::vector<bool> out;
        out.reserve(q->positions.size());
        for (int p : q->positions) out.push_back(in[p - 1]);
        return out;
      }
      case OpKind::Select: {
        std::vector<bool> in = run(q->left);
        check_cond(q->condition, in);
        return in;
      }
      case OpKind::Product: {
        std::vector<bool> l = run(q->left);
        std::vector<bool> r = run(q->right);
        l.insert(l.end(), r.begin(), r.end());
        return l;
      }
      case OpKind::UnionAll:
      case OpKind::ExceptAll: {
        std::vector<bool> l = run(q->left);
        std::vector<bool> r = run(q->right);
        for (std::size_t i = 0; i < l.size() && i < r.size(); ++i)
          if (r[i]) l[i] = true;
        return l;
      }
      case OpKind::Apply: {
        std::vector<bool> in = run(q->left);
        auto v = const_of(q->fn);
        if (!v) not_cells("non-constant function application");
        consts.push_back(*v);
        in.push_back(false);
        return in;
      }
      default:
        not_cells("value-creating aggregation");
    }
  }
};

// Odometer over per-null cell lists; invokes fn with one representative
// valuation and the cell mass.
struct CellGrid {
  struct Axis {
    NullId id;
    Distribution dist;
    std::vector<std::pair<double, double>> cells; // (p_lo, p_hi), positive width
    double rep_offset;
  };
  std::vector<Axis> axes;
  std::uint64_t cell_count = 1;

  template <typename F>
  void for_each(F&& fn) const {
    std::vector<std::size_t> idx(axes.size(), 0);
    Valuation v;
    for (;;) {
      double mass = 1.0;
      for (std::size_t a = 0; a < axes.size(); ++a) {
        const auto& [plo, phi] = axes[a].cells[idx[a]];
        mass *= phi - plo;
        v[axes[a].id] = dist_quantile(axes[a].dist, plo + (phi - plo) * axes[a].rep_offset);
      }
      fn(v, mass);
      std::size_t a = 0;
      for (; a < axes.size(); ++a) {
        if (++idx[a] < axes[a].cells.size()) break;
        idx[a] = 0;
      }
      if (a == axes.size()) break;
      if (axes.empty()) break;
    }
  }
};

} // namespace

double exact_likelihood_cells(const LikelihoodQuery& lq, const IncompleteDatabase& db,
                              std::uint64_t cell_limit, std::uint64_t* cells_out) {
  db.validate();
  const Schema schema = schema_of(db);
  const std::size_t arity = arity_check(lq.query, schema);
  if (!lq.intervals.empty() && lq.intervals.size() != arity)
    fail(ErrKind::Type, "answer template arity does not match query arity");

  std::vector<double> consts;
  CellAnalysis analysis{db, consts};
  analysis.run(lq.query);
  for (const IntervalSpec& s : lq.intervals)
    for (const ExprPtr& b : {s.lo, s.hi}) {
      if (!b) continue;
      auto v = analysis.const_of(b);
      if (!v) not_cells("template endpoint is not a constant");
      consts.push_back(*v);
    }

  std::sort(consts.begin(), consts.end());
  consts.erase(std::unique(consts.begin(), consts.end()), consts.end());

  CellGrid grid;
  std::size_t rank = 0;
  for (const auto& [id, dist] : db.annotations) {
    CellGrid::Axis axis;
    axis.id = id;
    axis.dist = dist;
    // Interleave representative offsets across axes so representatives
    // of different nulls never coincide with each other or a constant.
    axis.rep_offset = 0.25 + 0.5 * std::fmod(static_cast<double>(rank + 1) * 0.6180339887498949, 1.0);
    std::vector<double> ps{0.0, 1.0};
    for (double c : consts) ps.push_back(dist_cdf(dist, c));
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    for (std::size_t i = 0; i + 1 < ps.size(); ++i)
      if (ps[i + 1] > ps[i]) axis.cells.push_back({ps[i], ps[i + 1]});
    grid.cell_count *= axis.cells.size();
    if (grid.cell_count > cell_limit)
      fail(ErrKind::CellLimit, "cell decomposition exceeds " + std::to_string(cell_limit) + " cells");
    grid.axes.push_back(std::move(axis));
    ++rank;
  }

  double total = 0.0;
  grid.for_each([&](const Valuation& v, double mass) {
    const IncompleteDatabase ground = apply_valuation(v, db);
    const BagRelation answers = eval_query(lq.query, ground, EvalMode::Complete);
    const std::uint64_t count = count_consistent(lq.intervals, v, answers);
    if (compare_count(count, lq.cmp, lq.k)) total += mass;
  });
  if (cells_out) *cells_out = grid.cell_count;
  return total;
}

GridEstimate grid_likelihood(const LikelihoodQuery& lq, const IncompleteDatabase& db,
                             std::uint64_t resolution_per_null, std::uint64_t cell_limit) {
  db.validate();
  const Schema schema = schema_of(db);
  const std::size_t arity = arity_check(lq.query, schema);
  if (!lq.intervals.empty() && lq.intervals.size() != arity)
    fail(ErrKind::Type, "answer template arity does not match query arity");
  if (resolution_per_null < 2) fail(ErrKind::Config, "grid resolution must be at least 2");
  const std::size_t n = db.annotations.size();
  if (n > 3) fail(ErrKind::TooManyNulls, "grid oracle handles at most 3 nulls");

  constexpr double kTail = 1e-6;
  const double p_lo = kTail, p_hi = 1.0 - kTail;

  struct Axis {
    NullId id;
    Distribution dist;
  };
  std::vector<Axis> axes;
  for (const auto& [id, dist] : db.annotations) axes.push_back({id, dist});

  // Answer-template endpoints may reference nulls, so the event check
  // needs the full valuation; evaluate per grid point.
  auto event = [&](const Valuation& v) {
    const IncompleteDatabase ground = apply_valuation(v, db);
    const BagRelation answers = eval_query(lq.query, ground, EvalMode::Complete);
    return compare_count(count_consistent(lq.intervals, v, answers), lq.cmp, lq.k);
  };

  const std::uint64_t r = resolution_per_null;
  std::uint64_t cells = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (cells > cell_limit / r)
      fail(ErrKind::CellLimit, "grid exceeds " + std::to_string(cell_limit) + " cells");
    cells *= r;
  }

  auto p_of = [&](std::uint64_t step) { return p_lo + (p_hi - p_lo) * (static_cast<double>(step) / r); };

  // Indicator cache on grid nodes, keyed by the node index vector.
  std::map<std::vector<std::uint64_t>, bool> node_cache;
  auto node_event = [&](const std::vector<std::uint64_t>& steps) {
    auto it = node_cache.find(steps);
    if (it != node_cache.end()) return it->second;
    Valuation v;
    for (std::size_t a = 0; a < n; ++a) v[axes[a].id] = dist_quantile(axes[a].dist, p_of(steps[a]));
    const bool b = event(v);
    node_cache.emplace(steps, b);
    return b;
  };

  GridEstimate out;
  out.cells = n == 0 ? 1 : cells;
  if (n == 0) {
    // No nulls: the event either holds or not.
    out.value = event(Valuation{}) ? 1.0 : 0.0;
    out.uncertainty = 0.0;
    return out;
  }

  std::vector<std::uint64_t> idx(n, 0);
  const double span = p_hi - p_lo;
  for (;;) {
    double mass = 1.0;
    Valuation mid;
    for (std::size_t a = 0; a < n; ++a) {
      mass *= span / r;
      mid[axes[a].id] = dist_quantile(axes[a].dist, p_of(idx[a]) + 0.5 * span / r);
    }
    const bool mid_event = event(mid);
    if (mid_event) out.value += mass;
    // Corner disagreement marks cells the event boundary crosses.
    bool disagree = false;
    const std::size_t corners = std::size_t{1} << n;
    for (std::size_t c = 0; c < corners && !disagree; ++c) {
      std::vector<std::uint64_t> corner(n);
      for (std::size_t a = 0; a < n; ++a) corner[a] = idx[a] + ((c >> a) & 1);
      if (node_event(corner) != mid_event) disagree = true;
    }
    if (disagree) out.uncertainty += mass;
    std::size_t a = 0;
    for (; a < n; ++a) {
      if (++idx[a] < r) break;
      idx[a] = 0;
    }
    if (a == n) break;
  }
  // Mass outside the truncated box.
  out.uncertainty += 1.0 - std::pow(span, static_cast<double>(n));
  return out;
}

} // namespace nulldb
