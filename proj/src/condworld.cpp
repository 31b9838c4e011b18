#include "nulldb/condworld.hpp"

#include <cmath>
#include <unordered_map>

#include "nulldb/rng.hpp"

namespace nulldb {

void SymbolicRelation::add(const std::vector<ExprPtr>& t, std::uint64_t mult) {
  if (t.size() != arity) fail(ErrKind::Type, "tuple arity mismatch in symbolic bag");
  if (mult == 0) return;
  std::uint64_t& slot = rows[t];
  if (__builtin_add_overflow(slot, mult, &slot)) fail(ErrKind::Overflow, "multiplicity overflow");
}

ConditionalWorld world_of(const IncompleteDatabase& db) {
  db.validate();
  ConditionalWorld w;
  w.annotations = db.annotations;
  WorldPair pair;
  for (const auto& [name, rel] : db.relations) {
    SymbolicRelation sr;
    sr.arity = rel.arity();
    for (const auto& [t, m] : rel.rows()) {
      std::vector<ExprPtr> row;
      row.reserve(t.size());
      for (const Value& v : t)
        row.push_back(v.is_null() ? expr_null(v.null_id()) : expr_const(v.as_real()));
      sr.add(row, m);
    }
    pair.db.relations.emplace(name, std::move(sr));
  }
  pair.conditions.insert(expr_const(-1.0));
  w.pairs.push_back(std::move(pair));
  return w;
}

bool cond_holds(const ConditionSet& c, const Valuation& v) {
  ExprEnv env;
  env.nulls = &v;
  for (const ExprPtr& e : c)
    if (!(expr_eval(e, env) < 0.0)) return false;
  return true;
}

namespace {

using RelPair = std::pair<SymbolicRelation, ConditionSet>;
using RelWorld = std::vector<RelPair>;

struct Lifter {
  const ConditionalWorld& world;
  const Schema& schema;
  const LiftOptions& opts;
  std::unordered_map<const QueryNode*, RelWorld> memo;

  void check_cap(std::size_t n) {
    if (n > opts.blowup_cap)
      fail(ErrKind::BlowupLimit, "conditional world grew past " + std::to_string(opts.blowup_cap) +
                                     " pairs; raise the blowup cap to continue");
  }

  static ExprPtr entry_minus(const ExprPtr& a, const ExprPtr& b) {
    return rational_to_expr(rational_from_expr(a) - rational_from_expr(b));
  }

  RelWorld lift_select_lt(const RelWorld& in, int i, int j) {
    RelWorld out;
    for (const RelPair& pair : in) {
      const SymbolicRelation& rel = pair.first;
      // Difference entry_i - entry_j per distinct row; constants decide
      // membership immediately, the rest parameterize the split.
      std::vector<ExprPtr> diffs; // distinct non-constant differences
      auto diff_index = [&](const ExprPtr& d) -> std::size_t {
        for (std::size_t t = 0; t < diffs.size(); ++t)
          if (expr_equal(diffs[t], d)) return t;
        diffs.push_back(d);
        return diffs.size() - 1;
      };
      struct RowFate {
        const std::vector<ExprPtr>* row;
        std::uint64_t mult;
        int fate; // -1 keep always, -2 drop always, else diff index
      };
      std::vector<RowFate> fates;
      for (const auto& [row, m] : rel.rows) {
        ExprPtr d = entry_minus(row[i - 1], row[j - 1]);
        RowFate f{&row, m, -2};
        if (d->kind == RatExpr::Kind::Const)
          f.fate = d->value < 0.0 ? -1 : -2;
        else
          f.fate = static_cast<int>(diff_index(d));
        fates.push_back(f);
      }
      if (diffs.size() > 40)
        fail(ErrKind::BlowupLimit, "selection would split one pair into 2^" +
                                       std::to_string(diffs.size()) + " branches");
      const std::size_t branches = std::size_t{1} << diffs.size();
      check_cap(out.size() + branches);
      std::vector<ExprPtr> negs;
      negs.reserve(diffs.size());
      for (const ExprPtr& d : diffs) negs.push_back(canonical_negate(d));
      for (std::size_t mask = 0; mask < branches; ++mask) {
        SymbolicRelation kept;
        kept.arity = rel.arity;
        for (const RowFate& f : fates) {
          if (f.fate == -2) continue;
          if (f.fate == -1 || (mask >> f.fate) & 1) kept.add(*f.row, f.mult);
        }
        ConditionSet conds = pair.second;
        for (std::size_t t = 0; t < diffs.size(); ++t)
          conds.insert((mask >> t) & 1 ? diffs[t] : negs[t]);
        out.push_back({std::move(kept), std::move(conds)});
      }
    }
    return out;
  }

  RelWorld run(const AstPtr& q) {
    auto it = memo.find(q.get());
    if (it != memo.end()) return it->second;
    RelWorld out;
    switch (q->kind) {
      case OpKind::Base: {
        for (const WorldPair& p : world.pairs) {
          auto rit = p.db.relations.find(q->base_name);
          if (rit == p.db.relations.end()) fail(ErrKind::Type, "unknown relation " + q->base_name);
          out.push_back({rit->second, p.conditions});
        }
        break;
      }
      case OpKind::Literal: {
        SymbolicRelation sr;
        sr.arity = q->literal.arity;
        for (const LiteralRow& row : q->literal.rows) {
          std::vector<ExprPtr> entries;
          entries.reserve(row.entries.size());
          for (const ExprPtr& e : row.entries) entries.push_back(canonicalize_expr(e));
          sr.add(entries, row.mult);
        }
        for (const WorldPair& p : world.pairs) out.push_back({sr, p.conditions});
        break;
      }
      case OpKind::Project: {
        for (RelPair& p : run_copy(q->left)) {
          SymbolicRelation nr;
          nr.arity = q->positions.size();
          for (const auto& [row, m] : p.first.rows) {
            std::vector<ExprPtr> nt;
            nt.reserve(q->positions.size());
            for (int pos : q->positions) nt.push_back(row[pos - 1]);
            nr.add(nt, m);
          }
          out.push_back({std::move(nr), std::move(p.second)});
        }
        break;
      }
      case OpKind::Select: {
        const CondPtr& c = q->condition;
        if (c->kind == Condition::Kind::Lt) {
          out = lift_select_lt(run(q->left), c->i, c->j);
        } else if (c->kind == Condition::Kind::Eq || c->kind == Condition::Kind::IsConst) {
          for (RelPair& p : run_copy(q->left)) {
            SymbolicRelation nr;
            nr.arity = p.first.arity;
            for (const auto& [row, m] : p.first.rows) {
              const bool keep = c->kind == Condition::Kind::Eq
                                    ? expr_equal(row[c->i - 1], row[c->j - 1])
                                    : row[c->i - 1]->kind == RatExpr::Kind::Const;
              if (keep) nr.add(row, m);
            }
            out.push_back({std::move(nr), std::move(p.second)});
          }
        } else {
          fail(ErrKind::Type, "lift expects a core query; desugar first");
        }
        break;
      }
      case OpKind::Product:
      case OpKind::UnionAll:
      case OpKind::ExceptAll: {
        RelWorld l = run(q->left);
        RelWorld r = run(q->right);
        check_cap(l.size() * r.size());
        for (const RelPair& lp : l)
          for (const RelPair& rp : r) {
            SymbolicRelation nr;
            if (q->kind == OpKind::Product) {
              nr.arity = lp.first.arity + rp.first.arity;
              for (const auto& [lt, lm] : lp.first.rows)
                for (const auto& [rt, rm] : rp.first.rows) {
                  std::vector<ExprPtr> t = lt;
                  t.insert(t.end(), rt.begin(), rt.end());
                  std::uint64_t m;
                  if (__builtin_mul_overflow(lm, rm, &m))
                    fail(ErrKind::Overflow, "multiplicity overflow");
                  nr.add(t, m);
                }
            } else if (q->kind == OpKind::UnionAll) {
              if (lp.first.arity != rp.first.arity) fail(ErrKind::Type, "union arity mismatch");
              nr = lp.first;
              for (const auto& [t, m] : rp.first.rows) nr.add(t, m);
            } else {
              if (lp.first.arity != rp.first.arity) fail(ErrKind::Type, "except arity mismatch");
              nr.arity = lp.first.arity;
              for (const auto& [t, m] : lp.first.rows) {
                auto rit = rp.first.rows.find(t);
                const std::uint64_t sub = rit == rp.first.rows.end() ? 0 : rit->second;
                if (m > sub) nr.add(t, m - sub);
              }
            }
            ConditionSet cs = lp.second;
            cs.insert(rp.second.begin(), rp.second.end());
            out.push_back({std::move(nr), std::move(cs)});
          }
        break;
      }
      case OpKind::Apply: {
        for (RelPair& p : run_copy(q->left)) {
          SymbolicRelation nr;
          nr.arity = p.first.arity + 1;
          for (const auto& [row, m] : p.first.rows) {
            std::vector<ExprPtr> nt = row;
            nt.push_back(canonicalize_expr(expr_subst_attrs(q->fn, row)));
            nr.add(nt, m);
          }
          out.push_back({std::move(nr), std::move(p.second)});
        }
        break;
      }
      case OpKind::SumGroup: {
        for (RelPair& p : run_copy(q->left)) {
          std::map<std::vector<ExprPtr>, RationalFn, ExprVecLess> sums;
          for (const auto& [row, m] : p.first.rows) {
            std::vector<ExprPtr> key;
            key.reserve(q->positions.size());
            for (int pos : q->positions) key.push_back(row[pos - 1]);
            RationalFn term =
                RationalFn::constant(static_cast<double>(m)) * rational_from_expr(row[q->agg_pos - 1]);
            auto [sit, fresh] = sums.emplace(key, term);
            if (!fresh) sit->second = sit->second + term;
          }
          if (q->positions.empty() && sums.empty())
            sums.emplace(std::vector<ExprPtr>{}, RationalFn::constant(0.0));
          SymbolicRelation nr;
          nr.arity = q->positions.size() + 1;
          for (const auto& [key, total] : sums) {
            std::vector<ExprPtr> t = key;
            t.push_back(rational_to_expr(total));
            nr.add(t, 1);
          }
          out.push_back({std::move(nr), std::move(p.second)});
        }
        break;
      }
      default:
        fail(ErrKind::Type, "lift expects a core query; desugar first");
    }
    check_cap(out.size());
    memo.emplace(q.get(), out);
    return out;
  }

  RelWorld run_copy(const AstPtr& q) { return run(q); }
};

} // namespace

ConditionalWorld lift(const AstPtr& q, const ConditionalWorld& w, const Schema& schema,
                      const LiftOptions& opts) {
  arity_check(q, schema);
  AstPtr core = desugar(q, schema);
  Lifter lifter{w, schema, opts, {}};
  RelWorld result = lifter.run(core);
  ConditionalWorld out;
  out.annotations = w.annotations;
  for (RelPair& p : result) {
    WorldPair wp;
    wp.db.relations.emplace("result", std::move(p.first));
    wp.conditions = std::move(p.second);
    out.pairs.push_back(std::move(wp));
  }
  if (opts.prune) out = prune_world(out);
  return out;
}

ConditionalWorld prune_world(const ConditionalWorld& w) {
  ConditionalWorld out;
  out.annotations = w.annotations;
  for (const WorldPair& p : w.pairs) {
    bool infeasible = false;
    for (const ExprPtr& e : p.conditions) {
      if (e->kind == RatExpr::Kind::Const && e->value >= 0.0) infeasible = true;
      if (!infeasible && p.conditions.count(canonical_negate(e))) infeasible = true;
      if (infeasible) break;
    }
    if (!infeasible) out.pairs.push_back(p);
  }
  return out;
}

namespace {

std::set<NullId> world_nulls(const ConditionalWorld& w) {
  std::set<NullId> out;
  for (const auto& [id, d] : w.annotations) out.insert(id);
  for (const WorldPair& p : w.pairs) {
    for (const auto& [name, rel] : p.db.relations)
      for (const auto& [t, m] : rel.rows)
        for (const ExprPtr& e : t)
          for (NullId id : expr_free_vars(e).nulls) out.insert(id);
    for (const ExprPtr& e : p.conditions)
      for (NullId id : expr_free_vars(e).nulls) out.insert(id);
  }
  return out;
}

// Draws a valuation for sample s, re-drawing while any condition member
// lands within `tol` of its zero boundary.  Retries use counter indices
// beyond the main sample range so they stay deterministic.
Valuation sample_clear_of_boundaries(const ConditionalWorld& w, const std::set<NullId>& ids,
                                     std::uint64_t seed, std::uint64_t index,
                                     std::uint64_t retry_base, std::uint64_t& resamples,
                                     double tol) {
  std::uint64_t use = index;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Valuation v;
    for (NullId id : ids) {
      auto it = w.annotations.find(id);
      if (it == w.annotations.end())
        fail(ErrKind::Type, "world references null n" + std::to_string(id) + " without an annotation");
      v[id] = null_draw(it->second, seed, id, use);
    }
    bool clear = true;
    ExprEnv env;
    env.nulls = &v;
    for (const WorldPair& p : w.pairs) {
      for (const ExprPtr& e : p.conditions)
        if (std::fabs(expr_eval(e, env)) <= tol) {
          clear = false;
          break;
        }
      if (!clear) break;
    }
    if (clear) return v;
    use = retry_base + resamples;
    ++resamples;
  }
  fail(ErrKind::Internal, "could not sample clear of condition boundaries");
}

constexpr double kBoundaryTol = 1e-12;

} // namespace

WorldValidation validate_world(const ConditionalWorld& w, std::uint64_t n_samples, std::uint64_t seed) {
  WorldValidation out;
  out.samples = n_samples;
  const std::set<NullId> ids = world_nulls(w);
  for (std::uint64_t s = 0; s < n_samples; ++s) {
    const Valuation v =
        sample_clear_of_boundaries(w, ids, seed, s, n_samples, out.boundary_resamples, kBoundaryTol);
    std::size_t holding = 0;
    for (const WorldPair& p : w.pairs)
      if (cond_holds(p.conditions, v)) ++holding;
    if (holding >= 1) ++out.coverage_hits;
    if (holding >= 2) ++out.disjointness_violations;
  }
  return out;
}

IncompleteDatabase instantiate(const ConditionalWorld& w, const Valuation& v) {
  const WorldPair* chosen = nullptr;
  for (const WorldPair& p : w.pairs) {
    if (!cond_holds(p.conditions, v)) continue;
    if (chosen) fail(ErrKind::MultiBranch, "several world branches hold under this valuation");
    chosen = &p;
  }
  if (!chosen) fail(ErrKind::NoBranch, "no world branch holds under this valuation");
  IncompleteDatabase out;
  ExprEnv env;
  env.nulls = &v;
  for (const auto& [name, rel] : chosen->db.relations) {
    BagRelation br(rel.arity);
    for (const auto& [t, m] : rel.rows) {
      Tuple row;
      row.reserve(t.size());
      for (const ExprPtr& e : t) row.push_back(Value::real(expr_eval(e, env)));
      br.add(row, m);
    }
    out.relations.emplace(name, std::move(br));
  }
  return out;
}

namespace {

bool close(double a, double b) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= 1e-9 * scale;
}

bool bags_close(const BagRelation& x, const BagRelation& y) {
  if (x.arity() != y.arity() || x.distinct_count() != y.distinct_count()) return false;
  auto xi = x.rows().begin();
  auto yi = y.rows().begin();
  for (; xi != x.rows().end(); ++xi, ++yi) {
    if (xi->second != yi->second) return false;
    for (std::size_t c = 0; c < xi->first.size(); ++c)
      if (!close(xi->first[c].as_real(), yi->first[c].as_real())) return false;
  }
  return true;
}

} // namespace

ExtensionCheck check_trivial_extension(const AstPtr& q, const IncompleteDatabase& db,
                                       std::uint64_t n_samples, std::uint64_t seed,
                                       const LiftOptions& opts) {
  db.validate();
  const Schema schema = schema_of(db);
  const AstPtr core = desugar(q, schema);
  const ConditionalWorld w0 = world_of(db);
  const ConditionalWorld lifted = lift(q, w0, schema, opts);

  ExtensionCheck out;
  out.samples = n_samples;
  out.world_pairs = lifted.pairs.size();
  const std::set<NullId> ids = world_nulls(lifted);
  for (std::uint64_t s = 0; s < n_samples; ++s) {
    const Valuation v = sample_clear_of_boundaries(lifted, ids, seed, s, n_samples,
                                                   out.boundary_resamples, kBoundaryTol);
    bool match = false;
    try {
      const BagRelation direct = eval_query(core, apply_valuation(v, db), EvalMode::Complete);
      const IncompleteDatabase inst = instantiate(lifted, v);
      const BagRelation& symbolic = inst.relations.at("result");
      match = bags_close(direct, symbolic);
    } catch (const Error&) {
      match = false;
    }
    if (!match) ++out.mismatches;
  }
  return out;
}

} // namespace nulldb
