/* C interface to the incomplete-database query engine.
 *
 * All functions return NULLDB_OK on success; on failure the return code
 * classifies the error and nulldb_last_error() (thread-local) holds a
 * message.  Strings returned through char** are heap-allocated JSON or
 * query text; release them with nulldb_string_free.  Handles are opaque
 * and freed with their matching *_free function.  NULL output pointers
 * and NULL required handles yield NULLDB_ERR_INVALID_ARGUMENT.
 */
#ifndef NULLDB_H
#define NULLDB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  NULLDB_OK = 0,
  NULLDB_ERR_PARSE = 1,
  NULLDB_ERR_TYPE = 2,
  NULLDB_ERR_CONFIG = 3,
  NULLDB_ERR_IO = 4,
  NULLDB_ERR_MISSING_NULL = 5,
  NULLDB_ERR_UNBOUND_VARIABLE = 6,
  NULLDB_ERR_DIV_BY_ZERO = 7,
  NULLDB_ERR_NULL_COMPARISON = 8,
  NULLDB_ERR_OVERFLOW = 9,
  NULLDB_ERR_BLOWUP_LIMIT = 10,
  NULLDB_ERR_CELL_LIMIT = 11,
  NULLDB_ERR_NOT_CELL_DECOMPOSABLE = 12,
  NULLDB_ERR_TOO_MANY_NULLS = 13,
  NULLDB_ERR_NO_BRANCH = 14,
  NULLDB_ERR_MULTI_BRANCH = 15,
  NULLDB_ERR_SAMPLE_ABORT = 16,
  NULLDB_ERR_INTERNAL = 17,
  NULLDB_ERR_INVALID_ARGUMENT = 18
} nulldb_status;

/* Comparison between the consistent-answer count and k. */
typedef enum {
  NULLDB_CMP_LT = 0,
  NULLDB_CMP_EQ = 1,
  NULLDB_CMP_GT = 2
} nulldb_cmp;

typedef struct nulldb_db nulldb_db;
typedef struct nulldb_query nulldb_query;
typedef struct nulldb_intervals nulldb_intervals;
typedef struct nulldb_world nulldb_world;

typedef struct {
  double epsilon;            /* additive error bound; default 0.05 */
  uint64_t seed;             /* RNG seed; default 1 */
  uint64_t gamma_override;   /* 0: use ceil(epsilon^-2) samples */
  uint64_t trials;           /* odd; > 1 takes the median of that many
                                independent runs; default 1 */
  uint32_t threads;          /* sampling threads; 0 behaves like 1 */
  int skip_bad_samples;      /* nonzero: count divide-by-zero samples as
                                failures instead of aborting the run */
  uint64_t blowup_cap;       /* conditional-world pair cap; default 4096 */
  int prune;                 /* nonzero: drop unsatisfiable world pairs */
  uint64_t cell_limit;       /* exact-oracle cell cap; default 1000000 */
  int indent;                /* JSON indent; negative for compact */
} nulldb_config;

/* Fills cfg with the defaults above. */
void nulldb_config_init(nulldb_config* cfg);

/* Thread-local description and status of the most recent failure. */
const char* nulldb_last_error(void);
nulldb_status nulldb_last_status(void);
const char* nulldb_status_name(nulldb_status s);

/* ---- databases -------------------------------------------------- */
nulldb_status nulldb_db_from_json(const char* text, nulldb_db** out);
nulldb_status nulldb_db_to_json(const nulldb_db* db, int indent, char** out);
void nulldb_db_free(nulldb_db* db);

/* ---- queries ---------------------------------------------------- */
nulldb_status nulldb_query_parse(const char* text, nulldb_query** out);
nulldb_status nulldb_query_print(const nulldb_query* q, char** out);
/* Type/arity check against db's schema; also resolves the output arity. */
nulldb_status nulldb_query_check(const nulldb_query* q, const nulldb_db* db,
                                 uint64_t* out_arity);
void nulldb_query_free(nulldb_query* q);

/* ---- answer templates ------------------------------------------- */
/* JSON array of {"lo", "hi", "lo_closed", "hi_closed"}; bounds are
 * numbers, expression strings over nulls, or "-inf" / "+inf". */
nulldb_status nulldb_intervals_from_json(const char* text, nulldb_intervals** out);
nulldb_status nulldb_intervals_to_json(const nulldb_intervals* a, int indent, char** out);
void nulldb_intervals_free(nulldb_intervals* a);

/* ---- likelihood estimation -------------------------------------- */
/* a may be NULL for the empty template (every answer tuple counts).
 * out_json: {"value", "epsilon", "gamma", "seed", "failures"}. */
nulldb_status nulldb_likelihood(const nulldb_db* db, const nulldb_query* q,
                                const nulldb_intervals* a, nulldb_cmp cmp, uint64_t k,
                                const nulldb_config* cfg, char** out_json);

/* Decides value > delta with one ensemble; out_json adds "verdict". */
nulldb_status nulldb_threshold(const nulldb_db* db, const nulldb_query* q,
                               const nulldb_intervals* a, nulldb_cmp cmp, uint64_t k,
                               double delta, const nulldb_config* cfg, char** out_json);

/* ---- compilation to a single query ------------------------------ */
/* The whole sampling run as one query over db, evaluated naively.
 * run != 0 also evaluates it and embeds the result relation. */
nulldb_status nulldb_rewrite_apx(const nulldb_db* db, const nulldb_query* q,
                                 const nulldb_intervals* a, nulldb_cmp cmp, uint64_t k,
                                 const nulldb_config* cfg, int run, char** out_json);
nulldb_status nulldb_rewrite_compute(const nulldb_db* db, const nulldb_query* q,
                                     const nulldb_config* cfg, int run, char** out_json);

/* ---- direct evaluation ------------------------------------------ */
/* naive == 0: complete evaluation (db must hold no nulls).
 * naive != 0: nulls are opaque constants. */
nulldb_status nulldb_eval(const nulldb_db* db, const nulldb_query* q, int naive,
                          int indent, char** out_json);

/* ---- independent ground truth ----------------------------------- */
/* out_cells may be NULL; otherwise receives the cell count. */
nulldb_status nulldb_oracle_exact(const nulldb_db* db, const nulldb_query* q,
                                  const nulldb_intervals* a, nulldb_cmp cmp, uint64_t k,
                                  const nulldb_config* cfg, double* out_value,
                                  uint64_t* out_cells);
/* out_json: {"value", "mode", "uncertainty", "cells"}. */
nulldb_status nulldb_oracle_grid(const nulldb_db* db, const nulldb_query* q,
                                 const nulldb_intervals* a, nulldb_cmp cmp, uint64_t k,
                                 uint64_t resolution, const nulldb_config* cfg,
                                 char** out_json);

/* ---- conditional worlds ----------------------------------------- */
nulldb_status nulldb_world_of(const nulldb_db* db, nulldb_world** out);
nulldb_status nulldb_world_from_json(const char* text, nulldb_world** out);
nulldb_status nulldb_world_to_json(const nulldb_world* w, int indent, char** out);
void nulldb_world_free(nulldb_world* w);

/* Applies q to every pair of w; needs db only for its schema. */
nulldb_status nulldb_lift(const nulldb_query* q, const nulldb_world* w,
                          const nulldb_db* db, const nulldb_config* cfg,
                          nulldb_world** out);

/* out_json: {"samples", "coverage_hits", "disjointness_violations",
 * "boundary_resamples"}. */
nulldb_status nulldb_world_validate(const nulldb_world* w, uint64_t samples,
                                    uint64_t seed, char** out_json);

/* Lifts q over db's trivial world and replays sampled valuations both
 * ways; out_json: {"samples", "mismatches", "boundary_resamples",
 * "world_pairs"}. */
nulldb_status nulldb_check_extension(const nulldb_db* db, const nulldb_query* q,
                                     uint64_t samples, uint64_t seed,
                                     const nulldb_config* cfg, char** out_json);

void nulldb_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NULLDB_H */
