#include "nulldb/json_io.hpp"

#include <cstdlib>

#include <json.hpp>

namespace nulldb {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrKind::Parse, msg); }

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) bad("malformed JSON");
  return j;
}

ordered value_to_json(const Value& v) {
  if (v.is_real()) return ordered(v.as_real());
  ordered o;
  o["null"] = v.null_id();
  return o;
}

Value value_from_json(const json& j) {
  if (j.is_number()) return Value::real(j.get<double>());
  if (j.is_object() && j.contains("null") && j["null"].is_number_unsigned())
    return Value::null(j["null"].get<NullId>());
  bad("tuple entries must be numbers or {\"null\": id}");
}

ordered relation_json(const BagRelation& rel) {
  ordered o;
  o["arity"] = rel.arity();
  ordered tuples = ordered::array();
  ordered mults = ordered::array();
  for (const auto& [t, m] : rel.rows()) {
    ordered row = ordered::array();
    for (const Value& v : t) row.push_back(value_to_json(v));
    tuples.push_back(std::move(row));
    mults.push_back(m);
  }
  o["tuples"] = std::move(tuples);
  o["multiplicities"] = std::move(mults);
  return o;
}

BagRelation relation_from(const json& j) {
  if (!j.is_object() || !j.contains("arity") || !j["arity"].is_number_unsigned())
    bad("relation needs an unsigned \"arity\"");
  BagRelation rel(j["arity"].get<std::size_t>());
  const json& tuples = j.value("tuples", json::array());
  const json& mults = j.value("multiplicities", json::array());
  if (!tuples.is_array() || !mults.is_array()) bad("\"tuples\" and \"multiplicities\" must be arrays");
  if (!mults.empty() && mults.size() != tuples.size())
    bad("\"multiplicities\" length must match \"tuples\"");
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const json& row = tuples[i];
    if (!row.is_array() || row.size() != rel.arity()) bad("tuple arity mismatch");
    Tuple t;
    t.reserve(row.size());
    for (const json& cell : row) t.push_back(value_from_json(cell));
    std::uint64_t m = 1;
    if (i < mults.size()) {
      if (!mults[i].is_number_unsigned() || mults[i].get<std::uint64_t>() == 0)
        bad("multiplicities must be positive integers");
      m = mults[i].get<std::uint64_t>();
    }
    rel.add(t, m);
  }
  return rel;
}

ordered dist_json(const Distribution& d) {
  ordered o;
  switch (d.kind) {
    case Distribution::Kind::Normal:
      o["kind"] = "normal";
      o["mu"] = d.a;
      o["sigma"] = d.b;
      break;
    case Distribution::Kind::Uniform:
      o["kind"] = "uniform";
      o["l"] = d.a;
      o["u"] = d.b;
      break;
    case Distribution::Kind::Exponential:
      o["kind"] = "exponential";
      o["lambda"] = d.a;
      break;
  }
  return o;
}

Distribution dist_from(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    bad("distribution needs a \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  auto num = [&](const char* field) {
    if (!j.contains(field) || !j[field].is_number())
      bad("distribution \"" + kind + "\" needs numeric \"" + field + "\"");
    return j[field].get<double>();
  };
  if (kind == "normal") return Distribution::normal(num("mu"), num("sigma"));
  if (kind == "uniform") return Distribution::uniform(num("l"), num("u"));
  if (kind == "exponential") return Distribution::exponential(num("lambda"));
  bad("unknown distribution kind \"" + kind + "\"");
}

std::map<NullId, Distribution> annotations_from(const json& j) {
  std::map<NullId, Distribution> out;
  if (j.is_null()) return out;
  if (!j.is_object()) bad("\"nulls\" must map null ids to distributions");
  for (const auto& [key, val] : j.items()) {
    char* end = nullptr;
    const unsigned long id = std::strtoul(key.c_str(), &end, 10);
    if (end == key.c_str() || *end != '\0') bad("null ids must be decimal strings");
    out.emplace(static_cast<NullId>(id), dist_from(val));
  }
  return out;
}

ordered annotations_json(const std::map<NullId, Distribution>& a) {
  ordered o = ordered::object();
  for (const auto& [id, d] : a) o[std::to_string(id)] = dist_json(d);
  return o;
}

ExprPtr bound_from(const json& j, bool lo) {
  if (j.is_number()) return expr_const(j.get<double>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "-inf") {
      if (!lo) bad("\"-inf\" is only valid as a lower bound");
      return nullptr;
    }
    if (s == "+inf" || s == "inf") {
      if (lo) bad("\"" + s + "\" is only valid as an upper bound");
      return nullptr;
    }
    return expr_parse(s);
  }
  bad("interval bounds must be numbers, expression strings, or infinities");
}

ordered bound_json(const ExprPtr& e, bool lo) {
  if (!e) return ordered(lo ? "-inf" : "+inf");
  if (e->kind == RatExpr::Kind::Const) return ordered(e->value);
  return ordered(expr_print(e));
}

} // namespace

std::string db_to_json(const IncompleteDatabase& db, int indent) {
  ordered o;
  ordered rels = ordered::object();
  for (const auto& [name, rel] : db.relations) rels[name] = relation_json(rel);
  o["relations"] = std::move(rels);
  o["nulls"] = annotations_json(db.annotations);
  return o.dump(indent);
}

IncompleteDatabase db_from_json(const std::string& text) {
  json j = parse(text);
  if (!j.is_object()) bad("database document must be an object");
  IncompleteDatabase db;
  const json rels = j.value("relations", json::object());
  if (!rels.is_object()) bad("\"relations\" must be an object");
  for (const auto& [name, rel] : rels.items()) db.relations.emplace(name, relation_from(rel));
  db.annotations = annotations_from(j.value("nulls", json()));
  db.validate();
  return db;
}

std::string relation_to_json(const BagRelation& rel, int indent) {
  return relation_json(rel).dump(indent);
}

std::string intervals_to_json(const IntervalTuple& a, int indent) {
  ordered arr = ordered::array();
  for (const IntervalSpec& s : a) {
    ordered o;
    o["lo"] = bound_json(s.lo, true);
    o["hi"] = bound_json(s.hi, false);
    o["lo_closed"] = s.lo_closed && !s.lo_infinite();
    o["hi_closed"] = s.hi_closed && !s.hi_infinite();
    arr.push_back(std::move(o));
  }
  return arr.dump(indent);
}

IntervalTuple intervals_from_json(const std::string& text) {
  json j = parse(text);
  if (!j.is_array()) bad("an interval tuple is a JSON array");
  IntervalTuple out;
  for (const json& item : j) {
    if (!item.is_object()) bad("each interval is an object");
    IntervalSpec s;
    s.lo = bound_from(item.value("lo", json("-inf")), true);
    s.hi = bound_from(item.value("hi", json("+inf")), false);
    s.lo_closed = item.value("lo_closed", false);
    s.hi_closed = item.value("hi_closed", false);
    if (s.lo_infinite()) s.lo_closed = false;
    if (s.hi_infinite()) s.hi_closed = false;
    out.push_back(std::move(s));
  }
  return out;
}

std::string estimate_to_json(const Estimate& e, int indent) {
  ordered o;
  o["value"] = e.value;
  o["epsilon"] = e.epsilon;
  o["gamma"] = e.gamma;
  o["seed"] = e.seed;
  o["trials"] = e.trials;
  o["failures"] = e.failures;
  return o.dump(indent);
}

std::string threshold_to_json(const ThresholdResult& r, int indent) {
  ordered o;
  o["verdict"] = verdict_name(r.verdict);
  o["delta"] = r.delta;
  o["estimate"] = ordered::parse(estimate_to_json(r.estimate, 0));
  return o.dump(indent);
}

std::string world_to_json(const ConditionalWorld& w, int indent) {
  ordered o;
  ordered pairs = ordered::array();
  for (const WorldPair& p : w.pairs) {
    ordered po;
    ordered rels = ordered::object();
    for (const auto& [name, rel] : p.db.relations) {
      ordered ro;
      ro["arity"] = rel.arity;
      ordered tuples = ordered::array();
      ordered mults = ordered::array();
      for (const auto& [t, m] : rel.rows) {
        ordered row = ordered::array();
        for (const ExprPtr& e : t) row.push_back(expr_print(e));
        tuples.push_back(std::move(row));
        mults.push_back(m);
      }
      ro["tuples"] = std::move(tuples);
      ro["multiplicities"] = std::move(mults);
      rels[name] = std::move(ro);
    }
    po["relations"] = std::move(rels);
    ordered conds = ordered::array();
    for (const ExprPtr& e : p.conditions) conds.push_back(expr_print(e));
    po["conditions"] = std::move(conds);
    pairs.push_back(std::move(po));
  }
  o["pairs"] = std::move(pairs);
  o["nulls"] = annotations_json(w.annotations);
  return o.dump(indent);
}

ConditionalWorld world_from_json(const std::string& text) {
  json j = parse(text);
  if (!j.is_object() || !j.contains("pairs") || !j["pairs"].is_array())
    bad("world document needs a \"pairs\" array");
  ConditionalWorld w;
  w.annotations = annotations_from(j.value("nulls", json()));
  for (const json& pj : j["pairs"]) {
    WorldPair p;
    const json rels = pj.value("relations", json::object());
    if (!rels.is_object()) bad("\"relations\" must be an object");
    for (const auto& [name, rj] : rels.items()) {
      if (!rj.is_object() || !rj.contains("arity") || !rj["arity"].is_number_unsigned())
        bad("relation needs an unsigned \"arity\"");
      SymbolicRelation rel;
      rel.arity = rj["arity"].get<std::size_t>();
      const json& tuples = rj.value("tuples", json::array());
      const json& mults = rj.value("multiplicities", json::array());
      if (!tuples.is_array() || !mults.is_array()) bad("\"tuples\" and \"multiplicities\" must be arrays");
      for (std::size_t i = 0; i < tuples.size(); ++i) {
        const json& row = tuples[i];
        if (!row.is_array() || row.size() != rel.arity) bad("tuple arity mismatch");
        std::vector<ExprPtr> t;
        t.reserve(row.size());
        for (const json& cell : row) {
          if (cell.is_number())
            t.push_back(expr_const(cell.get<double>()));
          else if (cell.is_string())
            t.push_back(canonicalize_expr(expr_parse(cell.get<std::string>())));
          else
            bad("symbolic entries are numbers or expression strings");
        }
        std::uint64_t m = 1;
        if (i < mults.size()) {
          if (!mults[i].is_number_unsigned() || mults[i].get<std::uint64_t>() == 0)
            bad("multiplicities must be positive integers");
          m = mults[i].get<std::uint64_t>();
        }
        rel.add(t, m);
      }
      p.db.relations.emplace(name, std::move(rel));
    }
    const json conds = pj.value("conditions", json::array());
    if (!conds.is_array()) bad("\"conditions\" must be an array");
    for (const json& cj : conds) {
      if (cj.is_number())
        p.conditions.insert(expr_const(cj.get<double>()));
      else if (cj.is_string())
        p.conditions.insert(canonicalize_expr(expr_parse(cj.get<std::string>())));
      else
        bad("conditions are expression strings");
    }
    w.pairs.push_back(std::move(p));
  }
  return w;
}

std::string validation_to_json(const WorldValidation& v, int indent) {
  ordered o;
  o["samples"] = v.samples;
  o["coverage_hits"] = v.coverage_hits;
  o["disjointness_violations"] = v.disjointness_violations;
  o["boundary_resamples"] = v.boundary_resamples;
  return o.dump(indent);
}

std::string extension_to_json(const ExtensionCheck& c, int indent) {
  ordered o;
  o["samples"] = c.samples;
  o["mismatches"] = c.mismatches;
  o["boundary_resamples"] = c.boundary_resamples;
  o["world_pairs"] = c.world_pairs;
  return o.dump(indent);
}

std::string compiled_to_json(const CompiledQuery& c, const BagRelation* result, int indent) {
  ordered o;
  o["query"] = query_print(c.query);
  o["epsilon"] = c.epsilon;
  o["gamma"] = c.gamma;
  o["seed"] = c.seed;
  ordered prov = ordered::object();
  for (const auto& [sample, node] : c.provenance) prov[std::to_string(sample)] = node;
  o["provenance"] = std::move(prov);
  if (result) o["result"] = ordered::parse(relation_to_json(*result, 0));
  return o.dump(indent);
}

std::string grid_to_json(const GridEstimate& g, int indent) {
  ordered o;
  o["value"] = g.value;
  o["mode"] = "grid";
  o["uncertainty"] = g.uncertainty;
  o["cells"] = g.cells;
  return o.dump(indent);
}

} // namespace nulldb
