#include "nulldb/database.hpp"

#include "nulldb/rng.hpp"

namespace nulldb {

void BagRelation::add(const Tuple& t, std::uint64_t mult) {
  if (t.size() != arity_) fail(ErrKind::Type, "tuple arity mismatch in bag insert");
  if (mult == 0) return;
  std::uint64_t& slot = rows_[t];
  if (__builtin_add_overflow(slot, mult, &slot)) fail(ErrKind::Overflow, "multiplicity overflow");
}

std::uint64_t BagRelation::multiplicity(const Tuple& t) const {
  auto it = rows_.find(t);
  return it == rows_.end() ? 0 : it->second;
}

std::uint64_t BagRelation::total() const {
  std::uint64_t n = 0;
  for (const auto& [t, m] : rows_)
    if (__builtin_add_overflow(n, m, &n)) fail(ErrKind::Overflow, "multiplicity overflow");
  return n;
}

std::set<NullId> IncompleteDatabase::nulls_used() const {
  std::set<NullId> out;
  for (const auto& [name, rel] : relations)
    for (const auto& [t, m] : rel.rows())
      for (const Value& v : t)
        if (v.is_null()) out.insert(v.null_id());
  return out;
}

void IncompleteDatabase::validate() const {
  std::set<NullId> used = nulls_used();
  for (NullId id : used)
    if (!annotations.count(id))
      fail(ErrKind::MissingNull, "null n" + std::to_string(id) + " has no distribution annotation");
  for (const auto& [id, d] : annotations)
    if (!used.count(id))
      fail(ErrKind::Type, "annotation for n" + std::to_string(id) + " names a null not in the database");
}

BagRelation apply_valuation_rel(const Valuation& v, const BagRelation& rel) {
  BagRelation out(rel.arity());
  for (const auto& [t, m] : rel.rows()) {
    Tuple nt;
    nt.reserve(t.size());
    for (const Value& cell : t) {
      if (cell.is_real()) {
        nt.push_back(cell);
      } else {
        auto it = v.find(cell.null_id());
        if (it == v.end())
          fail(ErrKind::MissingNull, "valuation has no value for n" + std::to_string(cell.null_id()));
        nt.push_back(Value::real(it->second));
      }
    }
    out.add(nt, m);
  }
  return out;
}

IncompleteDatabase apply_valuation(const Valuation& v, const IncompleteDatabase& db) {
  IncompleteDatabase out;
  for (const auto& [name, rel] : db.relations) out.relations.emplace(name, apply_valuation_rel(v, rel));
  return out;
}

Valuation sample_valuation(const IncompleteDatabase& db, std::uint64_t seed, std::uint64_t index) {
  Valuation v;
  for (const auto& [id, d] : db.annotations) v[id] = null_draw(d, seed, id, index);
  return v;
}

} // namespace nulldb
