// Bridges the extern-C surface onto the C++ core: opaque handles own
// their C++ objects, exceptions become status codes, strings cross the
// boundary as malloc'd copies.
#include "nulldb.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "nulldb/condworld.hpp"
#include "nulldb/json_io.hpp"
#include "nulldb/oracle.hpp"
#include "nulldb/rewrite.hpp"

struct nulldb_db {
  nulldb::IncompleteDatabase db;
};
struct nulldb_query {
  nulldb::AstPtr q;
};
struct nulldb_intervals {
  nulldb::IntervalTuple a;
};
struct nulldb_world {
  nulldb::ConditionalWorld w;
};

namespace {

thread_local std::string g_last_error;
thread_local nulldb_status g_last_status = NULLDB_OK;

nulldb_status status_of(nulldb::ErrKind k) {
  using K = nulldb::ErrKind;
  switch (k) {
    case K::Parse: return NULLDB_ERR_PARSE;
    case K::Type: return NULLDB_ERR_TYPE;
    case K::Config: return NULLDB_ERR_CONFIG;
    case K::Io: return NULLDB_ERR_IO;
    case K::MissingNull: return NULLDB_ERR_MISSING_NULL;
    case K::UnboundVariable: return NULLDB_ERR_UNBOUND_VARIABLE;
    case K::DivByZero: return NULLDB_ERR_DIV_BY_ZERO;
    case K::NullComparison: return NULLDB_ERR_NULL_COMPARISON;
    case K::Overflow: return NULLDB_ERR_OVERFLOW;
    case K::BlowupLimit: return NULLDB_ERR_BLOWUP_LIMIT;
    case K::CellLimit: return NULLDB_ERR_CELL_LIMIT;
    case K::NotCellDecomposable: return NULLDB_ERR_NOT_CELL_DECOMPOSABLE;
    case K::TooManyNulls: return NULLDB_ERR_TOO_MANY_NULLS;
    case K::NoBranch: return NULLDB_ERR_NO_BRANCH;
    case K::MultiBranch: return NULLDB_ERR_MULTI_BRANCH;
    case K::SampleAbort: return NULLDB_ERR_SAMPLE_ABORT;
    case K::Internal: return NULLDB_ERR_INTERNAL;
  }
  return NULLDB_ERR_INTERNAL;
}

nulldb_status ok() {
  g_last_error.clear();
  g_last_status = NULLDB_OK;
  return NULLDB_OK;
}

nulldb_status set_error(nulldb_status s, const std::string& msg) {
  g_last_status = s;
  g_last_error = msg;
  return s;
}

template <typename F>
nulldb_status guard(F&& body) {
  try {
    body();
    return ok();
  } catch (const nulldb::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::exception& e) {
    return set_error(NULLDB_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(NULLDB_ERR_INTERNAL, "unknown failure");
  }
}

nulldb_status invalid(const char* what) {
  return set_error(NULLDB_ERR_INVALID_ARGUMENT, std::string("invalid argument: ") + what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nulldb_status emit(const std::string& s, char** out) {
  *out = dup_string(s);
  return *out ? ok() : set_error(NULLDB_ERR_INTERNAL, "out of memory");
}

nulldb::Comparison cmp_of(nulldb_cmp c) {
  switch (c) {
    case NULLDB_CMP_LT: return nulldb::Comparison::Less;
    case NULLDB_CMP_EQ: return nulldb::Comparison::Equal;
    case NULLDB_CMP_GT: return nulldb::Comparison::Greater;
  }
  nulldb::fail(nulldb::ErrKind::Config, "comparison must be <, =, or >");
}

nulldb_config defaults() {
  nulldb_config cfg;
  cfg.epsilon = 0.05;
  cfg.seed = 1;
  cfg.gamma_override = 0;
  cfg.trials = 1;
  cfg.threads = 1;
  cfg.skip_bad_samples = 0;
  cfg.blowup_cap = 4096;
  cfg.prune = 1;
  cfg.cell_limit = 1000000;
  cfg.indent = 2;
  return cfg;
}

nulldb_config cfg_or_default(const nulldb_config* cfg) { return cfg ? *cfg : defaults(); }

nulldb::ApproxOptions approx_opts(const nulldb_config& c) {
  nulldb::ApproxOptions o;
  o.gamma_override = c.gamma_override;
  o.skip_bad_samples = c.skip_bad_samples != 0;
  o.threads = c.threads == 0 ? 1u : c.threads;
  o.trials = c.trials;
  return o;
}

nulldb::LiftOptions lift_opts(const nulldb_config& c) {
  nulldb::LiftOptions o;
  o.blowup_cap = c.blowup_cap;
  o.prune = c.prune != 0;
  return o;
}

nulldb::LikelihoodQuery make_lq(const nulldb_query* q, const nulldb_intervals* a, nulldb_cmp cmp,
                                uint64_t k) {
  nulldb::LikelihoodQuery lq;
  lq.query = q->q;
  lq.cmp = cmp_of(cmp);
  lq.k = k;
  if (a) lq.intervals = a->a;
  return lq;
}

} // namespace

extern "C" {

void nulldb_config_init(nulldb_config* cfg) {
  if (cfg) *cfg = defaults();
}

const char* nulldb_last_error(void) { return g_last_error.c_str(); }

nulldb_status nulldb_last_status(void) { return g_last_status; }

const char* nulldb_status_name(nulldb_status s) {
  switch (s) {
    case NULLDB_OK: return "ok";
    case NULLDB_ERR_PARSE: return "parse";
    case NULLDB_ERR_TYPE: return "type";
    case NULLDB_ERR_CONFIG: return "config";
    case NULLDB_ERR_IO: return "io";
    case NULLDB_ERR_MISSING_NULL: return "missing-null";
    case NULLDB_ERR_UNBOUND_VARIABLE: return "unbound-variable";
    case NULLDB_ERR_DIV_BY_ZERO: return "div-by-zero";
    case NULLDB_ERR_NULL_COMPARISON: return "null-comparison";
    case NULLDB_ERR_OVERFLOW: return "overflow";
    case NULLDB_ERR_BLOWUP_LIMIT: return "blowup-limit";
    case NULLDB_ERR_CELL_LIMIT: return "cell-limit";
    case NULLDB_ERR_NOT_CELL_DECOMPOSABLE: return "not-cell-decomposable";
    case NULLDB_ERR_TOO_MANY_NULLS: return "too-many-nulls";
    case NULLDB_ERR_NO_BRANCH: return "no-branch";
    case NULLDB_ERR_MULTI_BRANCH: return "multi-branch";
    case NULLDB_ERR_SAMPLE_ABORT: return "sample-abort";
    case NULLDB_ERR_INTERNAL: return "internal";
    case NULLDB_ERR_INVALID_ARGUMENT: return "invalid-argument";
  }
  return "unknown";
}

nulldb_status nulldb_db_from_json(const char* text, nulldb_db** out) {
  if (!text || !out) return invalid("nulldb_db_from_json needs text and out");
  *out = nullptr;
  return guard([&] { *out = new nulldb_db{nulldb::db_from_json(text)}; });
}

nulldb_status nulldb_db_to_json(const nulldb_db* db, int indent, char** out) {
  if (!db || !out) return invalid("nulldb_db_to_json needs db and out");
  std::string text;
  const nulldb_status s = guard([&] { text = nulldb::db_to_json(db->db, indent); });
  return s == NULLDB_OK ? emit(text, out) : s;
}

void nulldb_db_free(nulldb_db* db) { delete db; }

nulldb_status nulldb_query_parse(const char* text, nulldb_query** out) {
  if (!text || !out) return invalid("nulldb_query_parse needs text and out");
  *out = nullptr;
  return guard([&] { *out = new nulldb_query{nulldb::query_parse(text)}; });
}

nulldb_status nulldb_query_print(const nulldb_query* q, char** out) {
  if (!q || !out) return invalid("nulldb_query_print needs query and out");
  std::string text;
  const nulldb_status s = guard([&] { text = nulldb::query_print(q->q); });
  return s == NULLDB_OK ? emit(text, out) : s;
}

nulldb_status nulldb_query_check(const nulldb_query* q, const nulldb_db* db, uint64_t* out_arity) {
  if (!q || !db) return invalid("nulldb_query_check needs query and db");
  return guard([&] {
    const std::size_t n = nulldb::arity_check(q->q, nulldb::schema_of(db->db));
    if (out_arity) *out_arity = n;
  });
}

void nulldb_query_free(nulldb_query* q) { delete q; }

nulldb_status nulldb_intervals_from_json(const char* text, nulldb_intervals** out) {
  if (!text || !out) return invalid("nulldb_intervals_from_json needs text and out");
  *out = nullptr;
  return guard([&] { *out = new nulldb_intervals{nulldb::intervals_from_json(text)}; });
}

nulldb_status nulldb_intervals_to_json(const nulldb_intervals* a, int indent, char** out) {
  if (!a || !out) return invalid("nulldb_intervals_to_json needs intervals and out");
  std::string text;
  const nulldb_status s = guard([&] { text = nulldb::intervals_to_json(a->a, indent); });
  return s == NULLDB_OK ? emit(text, out) : s;
}

void nulldb_intervals_free(nulldb_intervals* a) { delete a; }

nulldb_status nulldb_likelihood(const nulldb_db* db, const nulldb_query* q,
                                const nulldb_intervals* a, nulldb_cmp cmp, uint64_t k,
                                const nulldb_config* cfg, char** out_json) {
  if (!db || !q || !out_json) return invalid("nulldb_likelihood needs db, query, and out");
  const nulldb_config c = cfg_or_default(cfg);
  std::string text;
  const nulldb_status s = guard([&] {
    const nulldb::Estimate e =
        nulldb::like_apx(make_lq(q, a, cmp, k), db->db, c.epsilon, c.seed, approx_opts(c));
    text = nulldb::estimate_to_json(e, c.indent);
  });
  return s == NULLDB_OK ? emit(text, out_json) : s;
}

nulldb_status nulldb_threshold(const nulldb_db* db, const nulldb_query* q,
                               const nulldb_intervals* a, nulldb_cmp cmp, uint64_t k, double delta,
                               const nulldb_config* cfg, char** out_json) {
  if (!db || !q || !out_json) return invalid("nulldb_threshold needs db, query, and out");
  const nulldb_config c = cfg_or_default(cfg);
  std::string text;
  const nulldb_status s = guard([&] {
    const nulldb::ThresholdResult r = nulldb::threshold_decide(make_lq(q, a, cmp, k), delta,
                                                               db->db, c.epsilon, c.seed,
                                                               approx_opts(c));
    text = nulldb::threshold_to_json(r, c.indent);
  });
  return s == NULLDB_OK ? emit(text, out_json) : s;
}

nulldb_status nulldb_rewrite_apx(const nulldb_db* db, const nulldb_query* q,
                                 const nulldb_intervals* a, nulldb_cmp cmp, uint64_t k,
                                 const nulldb_config* cfg, int run, char** out_json) {
  if (!db || !q || !out_json) return invalid("nulldb_rewrite_apx needs db, query, and out");
  const nulldb_config c = cfg_or_default(cfg);
  std::string text;
  const nulldb_status s = guard([&] {
    const nulldb::CompiledQuery compiled =
        nulldb::build_apx_query(make_lq(q, a, cmp, k), db->db, c.epsilon, c.seed, approx_opts(c));
    if (run) {
      const nulldb::BagRelation result =
          nulldb::eval_query(compiled.query, db->db, nulldb::EvalMode::Naive);
      text = nulldb::compiled_to_json(compiled, &result, c.indent);
    } else {
      text = nulldb::compiled_to_json(compiled, nullptr, c.indent);
    }
  });
  return s == NULLDB_OK ? emit(text, out_json) : s;
}

nulldb_status nulldb_rewrite_compute(const nulldb_db* db, const nulldb_query* q,
                                     const nulldb_config* cfg, int run, char** out_json) {
  if (!db || !q || !out_json) return invalid("nulldb_rewrite_compute needs db, query, and out");
  const nulldb_config c = cfg_or_default(cfg);
  std::string text;
  const nulldb_status s = guard([&] {
    const nulldb::CompiledQuery compiled =
        nulldb::build_compute_query(q->q, db->db, c.epsilon, c.seed, approx_opts(c));
    if (run) {
      const nulldb::BagRelation result =
          nulldb::eval_query(compiled.query, db->db, nulldb::EvalMode::Naive);
      text = nulldb::compiled_to_json(compiled, &result, c.indent);
    } else {
      text = nulldb::compiled_to_json(compiled, nullptr, c.indent);
    }
  });
  return s == NULLDB_OK ? emit(text, out_json) : s;
}

nulldb_status nulldb_eval(const nulldb_db* db, const nulldb_query* q, int naive, int indent,
                          char** out_json) {
  if (!db || !q || !out_json) return invalid("nulldb_eval needs db, query, and out");
  std::string text;
  const nulldb_status s = guard([&] {
    const nulldb::BagRelation r = nulldb::eval_query(
        q->q, db->db, naive ? nulldb::EvalMode::Naive : nulldb::EvalMode::Complete);
    text = nulldb::relation_to_json(r, indent);
  });
  return s == NULLDB_OK ? emit(text, out_json) : s;
}

nulldb_status nulldb_oracle_exact(const nulldb_db* db, const nulldb_query* q,
                                  const nulldb_intervals* a, nulldb_cmp cmp, uint64_t k,
                                  const nulldb_config* cfg, double* out_value,
                                  uint64_t* out_cells) {
  if (!db || !q || !out_value) return invalid("nulldb_oracle_exact needs db, query, and out");
  const nulldb_config c = cfg_or_default(cfg);
  return guard([&] {
    *out_value =
        nulldb::exact_likelihood_cells(make_lq(q, a, cmp, k), db->db, c.cell_limit, out_cells);
  });
}

nulldb_status nulldb_oracle_grid(const nulldb_db* db, const nulldb_query* q,
                                 const nulldb_intervals* a, nulldb_cmp cmp, uint64_t k,
                                 uint64_t resolution, const nulldb_config* cfg, char** out_json) {
  if (!db || !q || !out_json) return invalid("nulldb_oracle_grid needs db, query, and out");
  const nulldb_config c = cfg_or_default(cfg);
  std::string text;
  const nulldb_status s = guard([&] {
    const nulldb::GridEstimate g =
        nulldb::grid_likelihood(make_lq(q, a, cmp, k), db->db, resolution, c.cell_limit);
    text = nulldb::grid_to_json(g, c.indent);
  });
  return s == NULLDB_OK ? emit(text, out_json) : s;
}

nulldb_status nulldb_world_of(const nulldb_db* db, nulldb_world** out) {
  if (!db || !out) return invalid("nulldb_world_of needs db and out");
  *out = nullptr;
  return guard([&] { *out = new nulldb_world{nulldb::world_of(db->db)}; });
}

nulldb_status nulldb_world_from_json(const char* text, nulldb_world** out) {
  if (!text || !out) return invalid("nulldb_world_from_json needs text and out");
  *out = nullptr;
  return guard([&] { *out = new nulldb_world{nulldb::world_from_json(text)}; });
}

nulldb_status nulldb_world_to_json(const nulldb_world* w, int indent, char** out) {
  if (!w || !out) return invalid("nulldb_world_to_json needs world and out");
  std::string text;
  const nulldb_status s = guard([&] { text = nulldb::world_to_json(w->w, indent); });
  return s == NULLDB_OK ? emit(text, out) : s;
}

void nulldb_world_free(nulldb_world* w) { delete w; }

nulldb_status nulldb_lift(const nulldb_query* q, const nulldb_world* w, const nulldb_db* db,
                          const nulldb_config* cfg, nulldb_world** out) {
  if (!q || !w || !db || !out) return invalid("nulldb_lift needs query, world, db, and out");
  const nulldb_config c = cfg_or_default(cfg);
  *out = nullptr;
  return guard([&] {
    *out = new nulldb_world{
        nulldb::lift(q->q, w->w, nulldb::schema_of(db->db), lift_opts(c))};
  });
}

nulldb_status nulldb_world_validate(const nulldb_world* w, uint64_t samples, uint64_t seed,
                                    char** out_json) {
  if (!w || !out_json) return invalid("nulldb_world_validate needs world and out");
  std::string text;
  const nulldb_status s = guard([&] {
    text = nulldb::validation_to_json(nulldb::validate_world(w->w, samples, seed), 2);
  });
  return s == NULLDB_OK ? emit(text, out_json) : s;
}

nulldb_status nulldb_check_extension(const nulldb_db* db, const nulldb_query* q, uint64_t samples,
                                     uint64_t seed, const nulldb_config* cfg, char** out_json) {
  if (!db || !q || !out_json) return invalid("nulldb_check_extension needs db, query, and out");
  const nulldb_config c = cfg_or_default(cfg);
  std::string text;
  const nulldb_status s = guard([&] {
    text = nulldb::extension_to_json(
        nulldb::check_trivial_extension(q->q, db->db, samples, seed, lift_opts(c)), c.indent);
  });
  return s == NULLDB_OK ? emit(text, out_json) : s;
}

void nulldb_string_free(char* s) { std::free(s); }

} // extern "C"
