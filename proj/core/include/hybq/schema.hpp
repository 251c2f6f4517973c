#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <string>

namespace hybq {

// Validates doc against a pragmatic JSON-Schema subset: type, enum,
// properties, required, additionalProperties (boolean form), items,
// minItems/maxItems, minimum/maximum/exclusiveMinimum. Throws
// ValidationError naming the offending path on the first violation.
void validate_against_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                             const std::string& where = "$");

// Schema documents compiled in from the schemas/ directory at build time;
// keys are the file names (e.g. "gate_sequence.schema.json").
const std::map<std::string, std::string>& schema_texts();

// Validates doc against the embedded schema named "<name>.schema.json".
void validate_with_named_schema(const nlohmann::json& doc, const std::string& name);

}  // namespace hybq
