#include "hybq/schema.hpp"

#include <mutex>

#include "hybq/errors.hpp"

namespace hybq {

namespace {

bool type_matches(const nlohmann::json& doc, const std::string& t) {
  if (t == "object") return doc.is_object();
  if (t == "array") return doc.is_array();
  if (t == "string") return doc.is_string();
  if (t == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
  if (t == "number") return doc.is_number();
  if (t == "boolean") return doc.is_boolean();
  if (t == "null") return doc.is_null();
  throw ValidationError("schema uses unsupported type '" + t + "'");
}

std::string type_name(const nlohmann::json& doc) {
  return doc.type_name();
}

}  // namespace

void validate_against_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                             const std::string& where) {
  if (!schema.is_object()) throw ValidationError("schema node at " + where + " must be an object");

  if (schema.contains("type")) {
    const auto& t = schema.at("type");
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(doc, t.get<std::string>());
    } else if (t.is_array()) {
      for (const auto& alt : t) ok = ok || type_matches(doc, alt.get<std::string>());
    }
    if (!ok)
      throw ValidationError(where + ": expected type " + t.dump() + ", got " + type_name(doc));
  }

  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& alt : schema.at("enum")) ok = ok || (doc == alt);
    if (!ok)
      throw ValidationError(where + ": value " + doc.dump() + " not in " +
                            schema.at("enum").dump());
  }

  if (doc.is_number()) {
    const double v = doc.get<double>();
    if (schema.contains("minimum") && v < schema.at("minimum").get<double>())
      throw ValidationError(where + ": " + doc.dump() + " below minimum " +
                            schema.at("minimum").dump());
    if (schema.contains("maximum") && v > schema.at("maximum").get<double>())
      throw ValidationError(where + ": " + doc.dump() + " above maximum " +
                            schema.at("maximum").dump());
    if (schema.contains("exclusiveMinimum") && v <= schema.at("exclusiveMinimum").get<double>())
      throw ValidationError(where + ": " + doc.dump() + " must exceed " +
                            schema.at("exclusiveMinimum").dump());
  }

  if (doc.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema.at("required")) {
        if (!doc.contains(key.get<std::string>()))
          throw ValidationError(where + ": missing required key '" + key.get<std::string>() +
                                "'");
      }
    }
    const nlohmann::json props =
        schema.contains("properties") ? schema.at("properties") : nlohmann::json::object();
    if (schema.value("additionalProperties", true) == false) {
      for (const auto& [key, _] : doc.items()) {
        if (!props.contains(key))
          throw ValidationError(where + ": unexpected key '" + key + "'");
      }
    }
    for (const auto& [key, sub] : props.items()) {
      if (doc.contains(key)) validate_against_schema(doc.at(key), sub, where + "." + key);
    }
  }

  if (doc.is_array()) {
    if (schema.contains("minItems") && doc.size() < schema.at("minItems").get<std::size_t>())
      throw ValidationError(where + ": fewer than " + schema.at("minItems").dump() + " items");
    if (schema.contains("maxItems") && doc.size() > schema.at("maxItems").get<std::size_t>())
      throw ValidationError(where + ": more than " + schema.at("maxItems").dump() + " items");
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < doc.size(); ++i)
        validate_against_schema(doc[i], schema.at("items"),
                                where + "[" + std::to_string(i) + "]");
    }
  }
}

void validate_with_named_schema(const nlohmann::json& doc, const std::string& name) {
  static std::map<std::string, nlohmann::json> parsed;
  static std::mutex mutex;
  const std::string file = name + ".schema.json";
  nlohmann::json schema;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = parsed.find(file);
    if (it == parsed.end()) {
      const auto& texts = schema_texts();
      auto tit = texts.find(file);
      if (tit == texts.end()) throw ValidationError("no schema named '" + name + "'");
      it = parsed.emplace(file, nlohmann::json::parse(tit->second)).first;
    }
    schema = it->second;
  }
  validate_against_schema(doc, schema, name);
}

}  // namespace hybq
