#include "nulldb/rewrite.hpp"

#include <unordered_map>

#include "nulldb/rng.hpp"

namespace nulldb {

BagRelation build_rand(const IncompleteDatabase& db, std::uint64_t gamma, std::uint64_t seed) {
  if (gamma == 0) fail(ErrKind::Config, "gamma must be positive");
  BagRelation out(static_cast<std::size_t>(gamma) + 1);
  for (const auto& [id, dist] : db.annotations) {
    Tuple row;
    row.reserve(gamma + 1);
    row.push_back(Value::null(id));
    for (std::uint64_t j = 1; j <= gamma; ++j) row.push_back(Value::real(null_draw(dist, seed, id, j)));
    out.add(row, 1);
  }
  return out;
}

namespace {

AstPtr literal_of(const BagRelation& rel) {
  LiteralBag bag;
  bag.arity = rel.arity();
  for (const auto& [t, m] : rel.rows()) {
    LiteralRow row;
    row.mult = m;
    row.entries.reserve(t.size());
    for (const Value& v : t)
      row.entries.push_back(v.is_null() ? expr_null(v.null_id()) : expr_const(v.as_real()));
    bag.rows.push_back(std::move(row));
  }
  return q_literal(std::move(bag));
}

struct Compiler {
  const Schema& schema;
  AstPtr rand_lit;
  std::uint64_t sample;
  std::unordered_map<std::string, AstPtr> gadgets;
  std::unordered_map<const QueryNode*, AstPtr> memo;

  // Lookup table for column j of R under this sample: all constant
  // self-pairs of that column, plus (null, draw_sample) rows, distinct.
  AstPtr column_lookup(const AstPtr& base, int j) {
    AstPtr col = q_project({j}, base);
    AstPtr const_pairs = q_select(cond_eq(1, 2), q_select(cond_isconst(1), q_product(col, col)));
    AstPtr null_rows = q_project({1, static_cast<int>(sample) + 1}, rand_lit);
    return q_dedup(q_union(std::move(const_pairs), std::move(null_rows)));
  }

  AstPtr gadget(const std::string& name) {
    auto it = gadgets.find(name);
    if (it != gadgets.end()) return it->second;
    auto sit = schema.find(name);
    if (sit == schema.end()) fail(ErrKind::Type, "unknown relation " + name);
    const int m = static_cast<int>(sit->second);
    if (m == 0) fail(ErrKind::Type, "arity-0 base relation " + name + " cannot be rewritten");
    AstPtr base = q_base(name);
    AstPtr joined = base;
    for (int j = 1; j <= m; ++j) joined = q_product(joined, column_lookup(base, j));
    // Key of lookup j sits at position m + 2j - 1, its image at m + 2j.
    for (int j = m; j >= 1; --j) joined = q_select(cond_eq(j, m + 2 * j - 1), joined);
    std::vector<int> images;
    for (int j = 1; j <= m; ++j) images.push_back(m + 2 * j);
    AstPtr out = q_project(std::move(images), std::move(joined));
    gadgets.emplace(name, out);
    return out;
  }

  AstPtr run(const AstPtr& q) {
    auto it = memo.find(q.get());
    if (it != memo.end()) return it->second;
    AstPtr out;
    switch (q->kind) {
      case OpKind::Base:
        out = gadget(q->base_name);
        break;
      case OpKind::Literal:
        for (const LiteralRow& row : q->literal.rows)
          for (const ExprPtr& e : row.entries)
            if (!expr_free_vars(e).nulls.empty())
              fail(ErrKind::Type, "literal with nulls cannot be rewritten");
        out = q;
        break;
      case OpKind::Project:
        out = q_project(q->positions, run(q->left));
        break;
      case OpKind::Select:
        out = q_select(q->condition, run(q->left));
        break;
      case OpKind::Product:
        out = q_product(run(q->left), run(q->right));
        break;
      case OpKind::UnionAll:
        out = q_union(run(q->left), run(q->right));
        break;
      case OpKind::ExceptAll:
        out = q_except(run(q->left), run(q->right));
        break;
      case OpKind::Apply:
        out = q_apply(q->fn, run(q->left));
        break;
      case OpKind::SumGroup:
        out = q_sum(q->positions, q->agg_pos, run(q->left));
        break;
      default:
        fail(ErrKind::Type, "compile_valuation expects a core query; desugar first");
    }
    if (q->sample_tag && out->sample_tag != q->sample_tag) out = with_sample_tag(out, q->sample_tag);
    memo.emplace(q.get(), out);
    return out;
  }
};

void collect_provenance(const AstPtr& q, std::size_t& counter,
                        std::unordered_map<const QueryNode*, bool>& seen,
                        std::map<std::uint64_t, std::size_t>& out) {
  if (!q || seen.count(q.get())) return;
  seen.emplace(q.get(), true);
  const std::size_t index = counter++;
  if (q->sample_tag && !out.count(q->sample_tag)) out[q->sample_tag] = index;
  collect_provenance(q->left, counter, seen, out);
  collect_provenance(q->right, counter, seen, out);
}

std::map<std::uint64_t, std::size_t> provenance_of(const AstPtr& q) {
  std::size_t counter = 0;
  std::unordered_map<const QueryNode*, bool> seen;
  std::map<std::uint64_t, std::size_t> out;
  collect_provenance(q, counter, seen, out);
  return out;
}

Valuation valuation_from_rand(const BagRelation& rand, std::uint64_t sample) {
  Valuation v;
  for (const auto& [row, m] : rand.rows()) v[row[0].null_id()] = row[sample].as_real();
  return v;
}

} // namespace

AstPtr compile_valuation(const AstPtr& core, const Schema& schema, const BagRelation& rand,
                         std::uint64_t sample) {
  if (sample == 0 || sample + 1 > rand.arity())
    fail(ErrKind::Config, "sample index outside the lookup table");
  Compiler c{schema, literal_of(rand), sample, {}, {}};
  return desugar(c.run(core), schema);
}

CompiledQuery build_apx_query(const LikelihoodQuery& lq, const IncompleteDatabase& db, double epsilon,
                              std::uint64_t seed, const ApproxOptions& opts) {
  db.validate();
  const Schema schema = schema_of(db);
  const std::size_t n = arity_check(lq.query, schema);
  if (!lq.intervals.empty() && lq.intervals.size() != n)
    fail(ErrKind::Type, "answer template arity does not match query arity");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) fail(ErrKind::Config, "epsilon must lie in (0, 1]");
  if (opts.trials > 1) fail(ErrKind::Config, "the compiled query covers a single trial; set trials to 1");
  const std::uint64_t gamma = gamma_for(epsilon, opts);

  const AstPtr core = desugar(lq.query, schema);
  const BagRelation rand = build_rand(db, gamma, seed);
  const AstPtr rand_lit = literal_of(rand);

  CmpOp op = lq.cmp == Comparison::Less ? CmpOp::Lt : lq.cmp == Comparison::Equal ? CmpOp::Eq : CmpOp::Gt;

  AstPtr chain;
  for (std::uint64_t j = 1; j <= gamma; ++j) {
    Compiler comp{schema, rand_lit, j, {}, {}};
    AstPtr compiled = comp.run(core);
    // Group every answer column and count: rows (answer tuple, count).
    std::vector<int> groups;
    for (int t = 1; t <= static_cast<int>(n); ++t) groups.push_back(t);
    AstPtr counted = q_count(groups, std::move(compiled));
    // Keep the groups inside the template, grounded under this sample.
    const Valuation v = valuation_from_rand(rand, j);
    AstPtr filtered = std::move(counted);
    for (std::size_t i = lq.intervals.size(); i-- > 0;) {
      const IntervalSpec& s = lq.intervals[i];
      IntervalSpec grounded;
      grounded.lo_closed = s.lo_closed;
      grounded.hi_closed = s.hi_closed;
      ExprEnv env;
      env.nulls = &v;
      if (!s.lo_infinite()) grounded.lo = expr_const(expr_eval(s.lo, env));
      if (!s.hi_infinite()) grounded.hi = expr_const(expr_eval(s.hi, env));
      filtered = q_select(cond_interval(static_cast<int>(i) + 1, grounded), std::move(filtered));
    }
    AstPtr consistent_count = q_project({static_cast<int>(n) + 1}, std::move(filtered));
    // Total consistent multiplicity, compared against k.
    AstPtr total = q_sum({}, 1, std::move(consistent_count));
    AstPtr decided = q_project({}, q_select(cond_cmp(expr_attr(1), op, expr_const(static_cast<double>(lq.k))),
                                            std::move(total)));
    // Indicator row: exactly one 0/1 value per sample.
    AstPtr indicator = q_sum({}, 1, q_apply(expr_const(1.0), std::move(decided)));
    indicator = with_sample_tag(indicator, j);
    chain = chain ? q_union(std::move(chain), std::move(indicator)) : std::move(indicator);
  }
  AstPtr averaged = q_avg({}, 1, std::move(chain));

  CompiledQuery out;
  out.query = desugar(averaged, schema);
  out.epsilon = epsilon;
  out.gamma = gamma;
  out.seed = seed;
  out.provenance = provenance_of(out.query);
  return out;
}

CompiledQuery build_compute_query(const AstPtr& q, const IncompleteDatabase& db, double epsilon,
                                  std::uint64_t seed, const ApproxOptions& opts) {
  db.validate();
  const Schema schema = schema_of(db);
  const std::size_t n = arity_check(q, schema);
  if (!(epsilon > 0.0 && epsilon <= 1.0)) fail(ErrKind::Config, "epsilon must lie in (0, 1]");
  if (opts.trials > 1) fail(ErrKind::Config, "the compiled query covers a single trial; set trials to 1");
  const std::uint64_t gamma = gamma_for(epsilon, opts);

  const AstPtr core = desugar(q, schema);
  const BagRelation rand = build_rand(db, gamma, seed);
  const AstPtr rand_lit = literal_of(rand);

  std::vector<int> groups;
  for (int t = 1; t <= static_cast<int>(n); ++t) groups.push_back(t);

  AstPtr chain;
  for (std::uint64_t j = 1; j <= gamma; ++j) {
    Compiler comp{schema, rand_lit, j, {}, {}};
    AstPtr counted = q_count(groups, comp.run(core));
    counted = with_sample_tag(counted, j);
    chain = chain ? q_union(std::move(chain), std::move(counted)) : std::move(counted);
  }
  // (answer tuple, count) -> how many samples produced it, then the
  // fraction of all samples.
  std::vector<int> wide_groups = groups;
  wide_groups.push_back(static_cast<int>(n) + 1);
  AstPtr tallied = q_count(wide_groups, std::move(chain));
  AstPtr fraction = q_apply(expr_div(expr_attr(static_cast<int>(n) + 2), expr_const(static_cast<double>(gamma))),
                            std::move(tallied));
  std::vector<int> keep = wide_groups;
  keep.push_back(static_cast<int>(n) + 3);
  AstPtr projected = q_project(std::move(keep), std::move(fraction));

  CompiledQuery out;
  out.query = desugar(projected, schema);
  out.epsilon = epsilon;
  out.gamma = gamma;
  out.seed = seed;
  out.provenance = provenance_of(out.query);
  return out;
}

} // namespace nulldb
