#pragma once

// Validator for the subset of JSON Schema used by the shipped schemas:
// type, enum, const, required, properties, additionalProperties, items,
// minimum, maximum, minItems, pattern-free strings and local $ref.

#include <string>
#include <vector>

#include "lgpos/report/report.hpp"

namespace lgpos::report {

class SchemaValidator {
 public:
  explicit SchemaValidator(json schema) : root_(std::move(schema)) {}

  /// Empty when valid; otherwise one message per violation.
  std::vector<std::string> validate(const json& doc) const {
    std::vector<std::string> errors;
    check(root_, doc, "$", errors);
    return errors;
  }

 private:
  const json& resolve(const json& s) const {
    if (!s.is_object() || !s.contains("$ref")) return s;
    std::string ref = s.at("$ref").get<std::string>();
    if (ref.rfind("#/", 0) != 0) throw std::invalid_argument("schema: only local $ref supported: " + ref);
    const json* cur = &root_;
    std::size_t pos = 2;
    while (pos <= ref.size()) {
      std::size_t next = ref.find('/', pos);
      if (next == std::string::npos) next = ref.size();
      cur = &cur->at(ref.substr(pos, next - pos));
      pos = next + 1;
    }
    return resolve(*cur);
  }

  static bool type_matches(const std::string& t, const json& v) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "integer") return v.is_number_integer() || v.is_number_unsigned();
    if (t == "number") return v.is_number();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    throw std::invalid_argument("schema: unknown type " + t);
  }

  void check(const json& schema_in, const json& v, const std::string& path, std::vector<std::string>& errors) const {
    const json& s = resolve(schema_in);
    if (s.is_boolean()) {
      if (!s.get<bool>()) errors.push_back(path + ": not allowed");
      return;
    }
    if (s.contains("type")) {
      const json& t = s.at("type");
      bool ok = false;
      if (t.is_string()) ok = type_matches(t.get<std::string>(), v);
      else
        for (const auto& x : t) ok = ok || type_matches(x.get<std::string>(), v);
      if (!ok) {
        errors.push_back(path + ": expected type " + t.dump());
        return;
      }
    }
    if (s.contains("const") && s.at("const") != v) errors.push_back(path + ": expected " + s.at("const").dump());
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s.at("enum")) found = found || e == v;
      if (!found) errors.push_back(path + ": " + v.dump() + " not in enum");
    }
    if (v.is_number()) {
      double x = v.get<double>();
      if (s.contains("minimum") && x < s.at("minimum").get<double>()) errors.push_back(path + ": below minimum");
      if (s.contains("maximum") && x > s.at("maximum").get<double>()) errors.push_back(path + ": above maximum");
    }
    if (v.is_object()) {
      if (s.contains("required"))
        for (const auto& k : s.at("required"))
          if (!v.contains(k.get<std::string>())) errors.push_back(path + ": missing " + k.get<std::string>());
      const json* props = s.contains("properties") ? &s.at("properties") : nullptr;
      for (auto it = v.begin(); it != v.end(); ++it) {
        std::string sub = path + "." + it.key();
        if (props && props->contains(it.key())) {
          check(props->at(it.key()), it.value(), sub, errors);
        } else if (s.contains("additionalProperties")) {
          check(s.at("additionalProperties"), it.value(), sub, errors);
        }
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s.at("minItems").get<std::size_t>())
        errors.push_back(path + ": too few items");
      if (s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i) check(s.at("items"), v[i], path + "[" + std::to_string(i) + "]", errors);
    }
  }

  json root_;
};

}  // namespace lgpos::report
