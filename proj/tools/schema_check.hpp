#pragma once

// Structural validation against the shipped schema files: the subset of JSON
// Schema the reports actually use (type / required / properties / items /
// enum). Returns human-readable problems, empty when the document conforms.

#include "json.hpp"

#include <string>
#include <vector>

namespace dlcorr::cli {

inline bool type_matches(const nlohmann::json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "number") return value.is_number();
  if (type == "integer") return value.is_number_integer();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

inline void schema_errors(const nlohmann::json& value, const nlohmann::json& schema,
                          const std::string& path, std::vector<std::string>& out) {
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(value, t.get<std::string>());
    } else if (t.is_array()) {
      for (const auto& alt : t) ok = ok || type_matches(value, alt.get<std::string>());
    }
    if (!ok) {
      out.push_back(path + ": type mismatch (expected " + t.dump() + ")");
      return;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& alt : schema["enum"]) ok = ok || alt == value;
    if (!ok) out.push_back(path + ": value not in enum " + schema["enum"].dump());
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>()))
          out.push_back(path + ": missing required key '" + key.get<std::string>() + "'");
      }
    }
    if (schema.contains("properties")) {
      for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it) {
        if (value.contains(it.key()))
          schema_errors(value.at(it.key()), it.value(), path + "/" + it.key(), out);
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    for (size_t k = 0; k < value.size(); ++k)
      schema_errors(value[k], schema["items"], path + "[" + std::to_string(k) + "]", out);
  }
}

inline std::vector<std::string> validate_schema(const nlohmann::json& value,
                                                const nlohmann::json& schema) {
  std::vector<std::string> out;
  schema_errors(value, schema, "", out);
  return out;
}

} // namespace dlcorr::cli
