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

#include "config.h"

#include <fstream>

namespace ope::cli {

ConfigObject::ConfigObject(const nlohmann::json& json, std::string path)
    : json_(json), path_(std::move(path)) {
  if (!json_.is_object()) {
    throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }
}

std::string ConfigObject::Field(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

bool ConfigObject::Has(const std::string& key) const {
  return json_.contains(key) && !json_.at(key).is_null();
}

ConfigObject ConfigObject::Object(const std::string& key) {
  seen_.insert(key);
  if (!json_.contains(key)) throw ConfigError(Field(key), "is required");
  return ConfigObject(json_.at(key), Field(key));
}

std::vector<ConfigObject> ConfigObject::Objects(const std::string& key) {
  seen_.insert(key);
  if (!json_.contains(key)) throw ConfigError(Field(key), "is required");
  const nlohmann::json& list = json_.at(key);
  if (!list.is_array()) throw ConfigError(Field(key), "must be an array");
  std::vector<ConfigObject> out;
  for (size_t i = 0; i < list.size(); ++i) {
    out.emplace_back(list[i], Field(key) + "[" + std::to_string(i) + "]");
  }
  return out;
}

void ConfigObject::Finish() const {
  for (const auto& item : json_.items()) {
    if (!seen_.contains(item.key())) {
      throw ConfigError(Field(item.key()), "unknown key");
    }
  }
}

nlohmann::json LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  if (!json.is_object()) throw ConfigError("<root>", "must be an object");
  if (!json.contains("schema_version")) {
    throw ConfigError("schema_version", "is required");
  }
  if (json["schema_version"] != kConfigSchemaVersion) {
    throw ConfigError("schema_version",
                      "unsupported value " + json["schema_version"].dump() +
                          " (expected " +
                          std::to_string(kConfigSchemaVersion) + ")");
  }
  return json;
}

}  // namespace ope::cli
