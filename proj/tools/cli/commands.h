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

#ifndef OPE_TOOLS_COMMANDS_H_
#define OPE_TOOLS_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "config.h"
#include "json.hpp"
#include "ope/data.h"
#include "ope/experiment.h"

namespace ope::cli {

struct CommonOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out_dir;
  int threads = 0;
};

// Settings shared by every command, read from the root config object with
// flags taking precedence.
struct RunSettings {
  uint64_t seed = 0;
  std::filesystem::path out_dir;
  int threads = 1;
};
RunSettings ReadRunSettings(ConfigObject& root, const CommonOptions& common);

// "pi1(0.9,0)", "pi2(0.5,0.2)" or "uniform".
PolicyParams ParsePolicyParams(const std::string& text,
                               const std::string& field);

// {"id", "csv", "sidecar"} or {"id", "synthetic": {...}}.
struct DatasetEntry {
  std::string id;
  FullInfoDataset data;
};
DatasetEntry ReadDatasetEntry(ConfigObject& entry, uint64_t default_seed);

// Opens out_dir / name for writing, creating the directory.
std::ofstream OpenOutput(const std::filesystem::path& dir,
                         const std::string& name);

int RunEvaluate(const nlohmann::json& config, const CommonOptions& common,
                std::ostream& out);
int RunSlate(const nlohmann::json& config, const CommonOptions& common,
             std::ostream& out);
int RunLearn(const nlohmann::json& config, const CommonOptions& common,
             std::ostream& out);
int RunSelftest(uint64_t seed, std::ostream& out);

}  // namespace ope::cli

#endif  // OPE_TOOLS_COMMANDS_H_
