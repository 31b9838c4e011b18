// Command-line front end.  Everything goes through the C API; the only
// things added here are file reading, flag parsing, and exit codes.
// Exactly one JSON document is written to stdout; diagnostics go to
// stderr.  Exit codes: 0 success, 1 bad input or configuration,
// 2 sampling aborted, 3 a blowup or cell cap was hit.
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nulldb.h"

namespace {

int exit_code_for(nulldb_status s) {
  switch (s) {
    case NULLDB_OK: return 0;
    case NULLDB_ERR_SAMPLE_ABORT: return 2;
    case NULLDB_ERR_BLOWUP_LIMIT:
    case NULLDB_ERR_CELL_LIMIT: return 3;
    default: return 1;
  }
}

[[noreturn]] void die(nulldb_status s) {
  std::fprintf(stderr, "error (%s): %s\n", nulldb_status_name(s), nulldb_last_error());
  std::exit(exit_code_for(s));
}

void check(nulldb_status s) {
  if (s != NULLDB_OK) die(s);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "error (io): cannot read %s\n", path.c_str());
    std::exit(1);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct DbDeleter {
  void operator()(nulldb_db* p) const { nulldb_db_free(p); }
};
struct QueryDeleter {
  void operator()(nulldb_query* p) const { nulldb_query_free(p); }
};
struct IntervalsDeleter {
  void operator()(nulldb_intervals* p) const { nulldb_intervals_free(p); }
};
struct WorldDeleter {
  void operator()(nulldb_world* p) const { nulldb_world_free(p); }
};
using DbPtr = std::unique_ptr<nulldb_db, DbDeleter>;
using QueryPtr = std::unique_ptr<nulldb_query, QueryDeleter>;
using IntervalsPtr = std::unique_ptr<nulldb_intervals, IntervalsDeleter>;
using WorldPtr = std::unique_ptr<nulldb_world, WorldDeleter>;

void print_doc(char* json) {
  std::printf("%s\n", json);
  nulldb_string_free(json);
}

struct Args {
  std::string db_path;
  std::string query;
  std::string query_file;
  std::string intervals_path;
  std::string intervals_json;
  std::string world_path;
  std::string cmp = "eq";
  std::string mode = "naive";
  std::uint64_t k = 1;
  double delta = 0.5;
  double epsilon = 0.05;
  std::uint64_t seed = 1;
  std::uint64_t gamma = 0;
  std::uint64_t trials = 1;
  unsigned threads = 1;
  bool skip_bad_samples = false;
  std::uint64_t blowup_cap = 4096;
  std::uint64_t cell_limit = 1000000;
  std::uint64_t samples = 10000;
  std::uint64_t resolution = 0;
  bool run = false;
  bool no_prune = false;
  int indent = 2;
};

nulldb_cmp parse_cmp(const std::string& s) {
  if (s == "lt" || s == "<" || s == "less") return NULLDB_CMP_LT;
  if (s == "eq" || s == "=" || s == "equal") return NULLDB_CMP_EQ;
  if (s == "gt" || s == ">" || s == "greater") return NULLDB_CMP_GT;
  std::fprintf(stderr, "error (config): --cmp must be lt, eq, or gt (got %s)\n", s.c_str());
  std::exit(1);
}

nulldb_config make_config(const Args& a) {
  nulldb_config cfg;
  nulldb_config_init(&cfg);
  cfg.epsilon = a.epsilon;
  cfg.seed = a.seed;
  cfg.gamma_override = a.gamma;
  cfg.trials = a.trials;
  cfg.threads = a.threads;
  cfg.skip_bad_samples = a.skip_bad_samples ? 1 : 0;
  cfg.blowup_cap = a.blowup_cap;
  cfg.prune = a.no_prune ? 0 : 1;
  cfg.cell_limit = a.cell_limit;
  cfg.indent = a.indent;
  return cfg;
}

DbPtr load_db(const Args& a) {
  nulldb_db* db = nullptr;
  check(nulldb_db_from_json(read_file(a.db_path).c_str(), &db));
  return DbPtr(db);
}

QueryPtr load_query(const Args& a) {
  std::string text = a.query;
  if (!a.query_file.empty()) text = read_file(a.query_file);
  if (text.empty()) {
    std::fprintf(stderr, "error (config): provide --query or --query-file\n");
    std::exit(1);
  }
  nulldb_query* q = nullptr;
  check(nulldb_query_parse(text.c_str(), &q));
  return QueryPtr(q);
}

IntervalsPtr load_intervals(const Args& a) {
  std::string text = a.intervals_json;
  if (!a.intervals_path.empty()) text = read_file(a.intervals_path);
  if (text.empty()) return nullptr; // empty template: every answer counts
  nulldb_intervals* iv = nullptr;
  check(nulldb_intervals_from_json(text.c_str(), &iv));
  return IntervalsPtr(iv);
}

void add_db_option(CLI::App* cmd, Args& a) {
  cmd->add_option("--db", a.db_path, "incomplete database (JSON file)")
      ->required()
      ->envname("NULLDB_DB");
}

void add_query_options(CLI::App* cmd, Args& a) {
  cmd->add_option("--query", a.query, "query text");
  cmd->add_option("--query-file", a.query_file, "file holding the query text");
}

void add_template_options(CLI::App* cmd, Args& a) {
  cmd->add_option("--intervals", a.intervals_path, "answer template (JSON file)");
  cmd->add_option("--intervals-json", a.intervals_json, "answer template (inline JSON)");
  cmd->add_option("--cmp", a.cmp, "comparison against k: lt, eq, gt (default eq)")
      ->envname("NULLDB_CMP");
  cmd->add_option("--k", a.k, "count threshold k (default 1)");
}

void add_sampling_options(CLI::App* cmd, Args& a) {
  cmd->add_option("--epsilon", a.epsilon, "additive error bound")->envname("NULLDB_EPSILON");
  cmd->add_option("--seed", a.seed, "RNG seed")->envname("NULLDB_SEED");
  cmd->add_option("--gamma", a.gamma, "sample-count override (0: ceil(epsilon^-2))")
      ->envname("NULLDB_GAMMA");
  cmd->add_option("--trials", a.trials,
                  "independent runs, odd; the median estimate is reported (default 1)")
      ->envname("NULLDB_TRIALS");
  cmd->add_option("--threads", a.threads, "sampling threads")->envname("NULLDB_THREADS");
  cmd->add_flag("--skip-bad-samples", a.skip_bad_samples,
                "count divide-by-zero samples as failures instead of aborting");
}

void add_indent_option(CLI::App* cmd, Args& a) {
  cmd->add_option("--indent", a.indent, "JSON indent (negative: compact)")
      ->envname("NULLDB_INDENT");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"query engine for numerical databases with distribution-annotated nulls"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nulldb 0.1.0");
  Args a;

  CLI::App* likelihood = app.add_subcommand(
      "likelihood", "estimate how likely the consistent-answer count compares to k");
  add_db_option(likelihood, a);
  add_query_options(likelihood, a);
  add_template_options(likelihood, a);
  add_sampling_options(likelihood, a);
  add_indent_option(likelihood, a);

  CLI::App* threshold =
      app.add_subcommand("threshold", "decide whether the likelihood exceeds delta");
  add_db_option(threshold, a);
  add_query_options(threshold, a);
  add_template_options(threshold, a);
  add_sampling_options(threshold, a);
  add_indent_option(threshold, a);
  threshold->add_option("--delta", a.delta, "decision threshold in [0, 1]")->required();

  CLI::App* rewrite = app.add_subcommand(
      "rewrite", "compile the whole estimation run into one query over the database");
  add_db_option(rewrite, a);
  add_query_options(rewrite, a);
  add_template_options(rewrite, a);
  add_sampling_options(rewrite, a);
  add_indent_option(rewrite, a);
  rewrite->add_flag("--run", a.run, "also evaluate the compiled query and embed the result");

  CLI::App* compute = app.add_subcommand(
      "compute", "compile an answer-space summary query (tuple, count, fraction of samples)");
  add_db_option(compute, a);
  add_query_options(compute, a);
  add_sampling_options(compute, a);
  add_indent_option(compute, a);
  compute->add_flag("--run", a.run, "also evaluate the compiled query and embed the result");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a query over the database directly");
  add_db_option(eval, a);
  add_query_options(eval, a);
  add_indent_option(eval, a);
  eval->add_option("--mode", a.mode, "complete (reject nulls) or naive (nulls as constants)")
      ->check(CLI::IsMember({"complete", "naive"}));

  CLI::App* lift = app.add_subcommand(
      "lift", "apply a query to a conditional world, branching on order comparisons");
  add_db_option(lift, a);
  add_query_options(lift, a);
  add_indent_option(lift, a);
  lift->add_option("--world", a.world_path,
                   "input world (JSON file); default: the database as one unconditional pair");
  lift->add_option("--blowup-cap", a.blowup_cap, "maximum number of world pairs")
      ->envname("NULLDB_BLOWUP_CAP");
  lift->add_flag("--no-prune", a.no_prune, "keep syntactically unsatisfiable pairs");

  CLI::App* validate = app.add_subcommand(
      "validate-world", "sample valuations and check branch coverage and disjointness");
  validate->add_option("--world", a.world_path, "world to validate (JSON file)")->required();
  validate->add_option("--samples", a.samples, "number of sampled valuations");
  validate->add_option("--seed", a.seed, "RNG seed")->envname("NULLDB_SEED");
  add_indent_option(validate, a);

  CLI::App* extension = app.add_subcommand(
      "check-extension",
      "check that lifting agrees with direct evaluation on sampled valuations");
  add_db_option(extension, a);
  add_query_options(extension, a);
  add_indent_option(extension, a);
  extension->add_option("--samples", a.samples, "number of sampled valuations");
  extension->add_option("--seed", a.seed, "RNG seed")->envname("NULLDB_SEED");
  extension->add_option("--blowup-cap", a.blowup_cap, "maximum number of world pairs")
      ->envname("NULLDB_BLOWUP_CAP");
  extension->add_flag("--no-prune", a.no_prune, "keep syntactically unsatisfiable pairs");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "ground-truth likelihood: exact cell decomposition, or quadrature with --resolution");
  add_db_option(oracle, a);
  add_query_options(oracle, a);
  add_template_options(oracle, a);
  add_indent_option(oracle, a);
  oracle->add_option("--resolution", a.resolution,
                     "grid points per null (0: exact cell decomposition)");
  oracle->add_option("--cell-limit", a.cell_limit, "maximum number of cells")
      ->envname("NULLDB_CELL_LIMIT");

  CLI11_PARSE(app, argc, argv);

  const nulldb_config cfg = make_config(a);
  char* out = nullptr;

  if (app.got_subcommand(likelihood)) {
    DbPtr db = load_db(a);
    QueryPtr q = load_query(a);
    IntervalsPtr iv = load_intervals(a);
    check(nulldb_likelihood(db.get(), q.get(), iv.get(), parse_cmp(a.cmp), a.k, &cfg, &out));
    print_doc(out);
  } else if (app.got_subcommand(threshold)) {
    DbPtr db = load_db(a);
    QueryPtr q = load_query(a);
    IntervalsPtr iv = load_intervals(a);
    check(nulldb_threshold(db.get(), q.get(), iv.get(), parse_cmp(a.cmp), a.k, a.delta, &cfg,
                           &out));
    print_doc(out);
  } else if (app.got_subcommand(rewrite)) {
    DbPtr db = load_db(a);
    QueryPtr q = load_query(a);
    IntervalsPtr iv = load_intervals(a);
    check(nulldb_rewrite_apx(db.get(), q.get(), iv.get(), parse_cmp(a.cmp), a.k, &cfg,
                             a.run ? 1 : 0, &out));
    print_doc(out);
  } else if (app.got_subcommand(compute)) {
    DbPtr db = load_db(a);
    QueryPtr q = load_query(a);
    check(nulldb_rewrite_compute(db.get(), q.get(), &cfg, a.run ? 1 : 0, &out));
    print_doc(out);
  } else if (app.got_subcommand(eval)) {
    DbPtr db = load_db(a);
    QueryPtr q = load_query(a);
    check(nulldb_eval(db.get(), q.get(), a.mode == "naive" ? 1 : 0, a.indent, &out));
    print_doc(out);
  } else if (app.got_subcommand(lift)) {
    DbPtr db = load_db(a);
    QueryPtr q = load_query(a);
    WorldPtr w;
    if (!a.world_path.empty()) {
      nulldb_world* raw = nullptr;
      check(nulldb_world_from_json(read_file(a.world_path).c_str(), &raw));
      w.reset(raw);
    } else {
      nulldb_world* raw = nullptr;
      check(nulldb_world_of(db.get(), &raw));
      w.reset(raw);
    }
    nulldb_world* lifted = nullptr;
    check(nulldb_lift(q.get(), w.get(), db.get(), &cfg, &lifted));
    WorldPtr lw(lifted);
    check(nulldb_world_to_json(lw.get(), a.indent, &out));
    print_doc(out);
  } else if (app.got_subcommand(validate)) {
    nulldb_world* raw = nullptr;
    check(nulldb_world_from_json(read_file(a.world_path).c_str(), &raw));
    WorldPtr w(raw);
    check(nulldb_world_validate(w.get(), a.samples, a.seed, &out));
    print_doc(out);
  } else if (app.got_subcommand(extension)) {
    DbPtr db = load_db(a);
    QueryPtr q = load_query(a);
    check(nulldb_check_extension(db.get(), q.get(), a.samples, a.seed, &cfg, &out));
    print_doc(out);
  } else if (app.got_subcommand(oracle)) {
    DbPtr db = load_db(a);
    QueryPtr q = load_query(a);
    IntervalsPtr iv = load_intervals(a);
    if (a.resolution > 0) {
      check(nulldb_oracle_grid(db.get(), q.get(), iv.get(), parse_cmp(a.cmp), a.k, a.resolution,
                               &cfg, &out));
      print_doc(out);
    } else {
      double value = 0.0;
      uint64_t cells = 0;
      check(nulldb_oracle_exact(db.get(), q.get(), iv.get(), parse_cmp(a.cmp), a.k, &cfg, &value,
                                &cells));
      // handcrafted so the value keeps full shortest-round-trip precision
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof(buf), value);
      const std::string num(buf, res.ptr);
      if (a.indent < 0) {
        std::printf("{\"value\":%s,\"mode\":\"exact\",\"uncertainty\":0.0,\"cells\":%llu}\n",
                    num.c_str(), static_cast<unsigned long long>(cells));
      } else {
        const std::string pad(a.indent, ' ');
        std::printf("{\n%s\"value\": %s,\n%s\"mode\": \"exact\",\n%s\"uncertainty\": 0.0,\n"
                    "%s\"cells\": %llu\n}\n",
                    pad.c_str(), num.c_str(), pad.c_str(), pad.c_str(), pad.c_str(),
                    static_cast<unsigned long long>(cells));
      }
    }
  }
  return 0;
}
