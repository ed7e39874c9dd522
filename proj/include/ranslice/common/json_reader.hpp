#pragma once

#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "ranslice/common/error.hpp"

namespace ranslice {

[[noreturn]] inline void parseError(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::ParseError, (path.empty() ? std::string("/") : path) + ": " + message,
              {{"location", path.empty() ? "/" : path}});
}

/// Strict reader over a JSON object. Tracks consumed keys so `finish()` can
/// reject anything unexpected; every failure names its JSON pointer.
class JsonReader {
 public:
  JsonReader(const json& object, std::string path) : j_(object), path_(std::move(path)) {
    if (!j_.is_object()) parseError(path_, "expected object");
  }
  // Holds a reference; a temporary would dangle.
  JsonReader(json&&, std::string) = delete;

  std::string pathOf(const std::string& key) const { return path_ + "/" + key; }
  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) parseError(pathOf(key), "missing required field");
    return j_.at(key);
  }

  const json* rawOpt(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return nullptr;
    return &j_.at(key);
  }

  template <class T>
  T req(const std::string& key) {
    return convert<T>(raw(key), pathOf(key));
  }

  template <class T>
  std::optional<T> opt(const std::string& key) {
    const json* v = rawOpt(key);
    if (!v) return std::nullopt;
    return convert<T>(*v, pathOf(key));
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    auto v = opt<T>(key);
    return v ? *v : fallback;
  }

  /// Marks a key as understood without reading it.
  void skip(const std::string& key) { seen_.insert(key); }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) parseError(pathOf(key), "unknown field '" + key + "'");
    }
  }

  template <class T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) parseError(path, "expected boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) parseError(path, "expected integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) parseError(path, "expected number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) parseError(path, "expected string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      if (!v.is_array()) parseError(path, "expected array");
      std::vector<std::string> out;
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(convert<std::string>(v[i], path + "/" + std::to_string(i)));
      return out;
    } else {
      static_assert(std::is_same_v<T, json>, "unsupported JsonReader type");
      return v;
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline const json& requireArray(const json& v, const std::string& path) {
  if (!v.is_array()) parseError(path, "expected array");
  return v;
}

}  // namespace ranslice
