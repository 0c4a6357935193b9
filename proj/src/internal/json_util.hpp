#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "reloc/error.hpp"
#include "reloc/geometry.hpp"

namespace reloc::detail {

using nlohmann::json;

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline json parse_document(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", what + " is not valid JSON: " + e.what());
  }
}

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(join(path, key), "missing required field");
  return *it;
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

inline std::int64_t as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<std::int64_t>();
}

inline std::uint64_t as_uint(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) throw SchemaError(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

inline const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

inline Vec3 as_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw SchemaError(path, "expected [x, y, z]");
  return {as_number(j[0], index(path, 0)), as_number(j[1], index(path, 1)),
          as_number(j[2], index(path, 2))};
}

inline Vec2 as_vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw SchemaError(path, "expected [x, z]");
  return {as_number(j[0], index(path, 0)), as_number(j[1], index(path, 1))};
}

inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
inline json to_json(const Vec2& v) { return json::array({v.x, v.z}); }

// Accepts a missing field (treated as current) or exactly kFormatVersion.
inline void check_format_version(const json& root, int expected) {
  auto it = root.find("format_version");
  if (it == root.end()) return;
  if (!it->is_number_integer() || it->get<int>() != expected)
    throw SchemaError("format_version",
                      "unsupported format version (expected " + std::to_string(expected) + ")");
}

}  // namespace reloc::detail
