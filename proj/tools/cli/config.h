/*
 * Copyright 2026 The ope-shrink Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OPE_TOOLS_CONFIG_H_
#define OPE_TOOLS_CONFIG_H_

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace ope::cli {

inline constexpr int kConfigSchemaVersion = 1;

// A bad or missing config value; the CLI exits with status 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message) {}
};

// Typed access to one JSON object. Every key read is recorded so Finish()
// can reject the ones nobody asked for.
class ConfigObject {
 public:
  ConfigObject(const nlohmann::json& json, std::string path);

  const std::string& path() const { return path_; }
  std::string Field(const std::string& key) const;
  bool Has(const std::string& key) const;

  template <typename T>
  T Get(const std::string& key, const T& fallback) {
    if (!Has(key)) {
      seen_.insert(key);
      return fallback;
    }
    return Require<T>(key);
  }

  template <typename T>
  T Require(const std::string& key) {
    seen_.insert(key);
    if (!json_.contains(key)) throw ConfigError(Field(key), "is required");
    try {
      return json_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(Field(key), "has the wrong type (" +
                                        json_.at(key).dump() + ")");
    }
  }

  ConfigObject Object(const std::string& key);
  std::vector<ConfigObject> Objects(const std::string& key);

  void Finish() const;

 private:
  const nlohmann::json& json_;
  std::string path_;
  std::set<std::string> seen_;
};

// Parses the file and checks schema_version.
nlohmann::json LoadConfigFile(const std::string& path);

}  // namespace ope::cli

#endif  // OPE_TOOLS_CONFIG_H_
