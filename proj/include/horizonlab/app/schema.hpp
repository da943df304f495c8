#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace horizonlab::app {

/// Canonical scenario schema (JSON Schema draft 2020-12).
const nlohmann::json& scenario_schema();

/// The schema pretty-printed with two-space indentation and a trailing newline.
std::string scenario_schema_text();

struct SchemaError {
    std::string path;  ///< JSON pointer into the instance ("" is the root)
    std::string message;
};

/// Validates `instance` against the keyword subset used by the scenario
/// schema: type, enum, const, required, properties, additionalProperties
/// (boolean), items, minItems, maxItems, uniqueItems, minLength, minimum,
/// maximum, exclusiveMinimum, exclusiveMaximum, local $ref, allOf, if/then
/// and not.  Every violation is reported, not only the first.  A schema using
/// any other assertion keyword raises std::logic_error.
std::vector<SchemaError> validate_json(const nlohmann::json& instance, const nlohmann::json& schema);

}  // namespace horizonlab::app
