#pragma once

#include <string>

#include "nulldb/approx.hpp"
#include "nulldb/condworld.hpp"
#include "nulldb/oracle.hpp"
#include "nulldb/rewrite.hpp"

namespace nulldb {

// Textual interchange formats.  Databases, relations, worlds and
// interval tuples have JSON forms; estimates and reports serialize to
// JSON objects.  All serialization is deterministic.

std::string db_to_json(const IncompleteDatabase& db, int indent = 2);
IncompleteDatabase db_from_json(const std::string& text);

std::string relation_to_json(const BagRelation& rel, int indent = 2);

std::string intervals_to_json(const IntervalTuple& a, int indent = 2);
IntervalTuple intervals_from_json(const std::string& text);

std::string estimate_to_json(const Estimate& e, int indent = 2);
std::string threshold_to_json(const ThresholdResult& r, int indent = 2);

std::string world_to_json(const ConditionalWorld& w, int indent = 2);
ConditionalWorld world_from_json(const std::string& text);

std::string validation_to_json(const WorldValidation& v, int indent = 2);
std::string extension_to_json(const ExtensionCheck& c, int indent = 2);

std::string compiled_to_json(const CompiledQuery& c, const BagRelation* result, int indent = 2);

std::string grid_to_json(const GridEstimate& g, int indent = 2);

} // namespace nulldb
