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

#include "cli.h"

#include <algorithm>
#include <fstream>
#include <regex>

#include "CLI11.hpp"
#include "commands.h"
#include "ope/error.h"
#include "ope/io.h"
#include "ope/parallel.h"
#include "ope/random.h"
#include "ope/simulation.h"

namespace ope::cli {
namespace {

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidSoftening:
    case ErrorCode::kBadFractions:
      return kExitConfig;
    case ErrorCode::kIoError:
    case ErrorCode::kParseError:
    case ErrorCode::kSpanViolation:
    case ErrorCode::kRankDeficient:
    case ErrorCode::kAbsoluteContinuityViolation:
    case ErrorCode::kZeroPropensity:
    case ErrorCode::kEmptyDataset:
      return kExitData;
    default:
      return kExitFailure;
  }
}

}  // namespace

RunSettings ReadRunSettings(ConfigObject& root, const CommonOptions& common) {
  RunSettings settings;
  root.Require<int>("schema_version");
  if (common.seed) {
    settings.seed = *common.seed;
    root.Get<uint64_t>("seed", 0);
  } else {
    settings.seed = root.Require<uint64_t>("seed");
  }
  std::string out = root.Get<std::string>("out", "");
  if (!common.out_dir.empty()) out = common.out_dir;
  if (out.empty()) throw ConfigError("out", "set --out or the 'out' key");
  settings.out_dir = out;
  const int threads = root.Get<int>("threads", 0);
  if (threads < 0) throw ConfigError("threads", "must be >= 0");
  settings.threads =
      ResolveThreadCount(common.threads > 0 ? common.threads : threads);
  return settings;
}

PolicyParams ParsePolicyParams(const std::string& text,
                               const std::string& field) {
  PolicyParams params;
  if (text == "uniform") {
    params.base = PolicyBase::kUniform;
    return params;
  }
  static const std::regex kPattern(
      R"(^\s*(pi1|pi2)\s*\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)\s*$)");
  std::smatch match;
  if (!std::regex_match(text, match, kPattern)) {
    throw ConfigError(field, "unknown policy '" + text +
                                 "' (expected pi1(a,b), pi2(a,b) or uniform)");
  }
  params.base = ParsePolicyBase(match[1].str());
  try {
    size_t used = 0;
    params.alpha = std::stod(match[2].str(), &used);
    if (used != match[2].str().size()) throw std::invalid_argument("alpha");
    params.beta = std::stod(match[3].str(), &used);
    if (used != match[3].str().size()) throw std::invalid_argument("beta");
  } catch (const std::exception&) {
    throw ConfigError(field, "bad softening numbers in '" + text + "'");
  }
  if (params.alpha - 0.5 * params.beta < 0.0 ||
      params.alpha + 0.5 * params.beta > 1.0 || params.beta < 0.0) {
    throw ConfigError(field, "softening '" + text +
                                 "' gives probabilities outside [0, 1]");
  }
  return params;
}

DatasetEntry ReadDatasetEntry(ConfigObject& entry, uint64_t default_seed) {
  DatasetEntry out;
  out.id = entry.Require<std::string>("id");
  if (out.id.empty()) throw ConfigError(entry.Field("id"), "must not be empty");
  if (entry.Has("synthetic")) {
    if (entry.Has("csv")) {
      throw ConfigError(entry.Field("csv"),
                        "give either 'csv' or 'synthetic', not both");
    }
    ConfigObject syn = entry.Object("synthetic");
    SyntheticSpec spec;
    spec.num_rows = syn.Get<size_t>("num_rows", spec.num_rows);
    spec.num_actions = syn.Get<int>("num_actions", spec.num_actions);
    spec.feature_dim = syn.Get<int>("feature_dim", spec.feature_dim);
    spec.separation = syn.Get<double>("separation", spec.separation);
    spec.noise = syn.Get<double>("noise", spec.noise);
    spec.seed = syn.Get<uint64_t>("seed", default_seed);
    syn.Finish();
    if (spec.num_rows < 8) throw ConfigError(syn.Field("num_rows"), "must be >= 8");
    if (spec.num_actions < 2) {
      throw ConfigError(syn.Field("num_actions"), "must be >= 2");
    }
    if (spec.feature_dim < 2) {
      throw ConfigError(syn.Field("feature_dim"), "must be >= 2");
    }
    out.data = MakeSyntheticDataset(spec);
  } else {
    const std::string csv = entry.Require<std::string>("csv");
    std::string sidecar = entry.Get<std::string>("sidecar", "");
    if (sidecar.empty()) {
      sidecar = std::filesystem::path(csv).replace_extension(".json").string();
    }
    out.data = LoadDataset(csv, sidecar);
  }
  entry.Finish();
  return out;
}

std::ofstream OpenOutput(const std::filesystem::path& dir,
                         const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    Fail(ErrorCode::kIoError,
         "cannot create " + dir.string() + ": " + ec.message());
  }
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + (dir / name).string());
  return out;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Off-policy evaluation with shrinkage", "ope_shrink"};
  app.require_subcommand(1);
  CommonOptions common;
  uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* config = sub->add_option("--config", common.config_path,
                                   "JSON run configuration");
    if (needs_config) config->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", common.out_dir, "output directory");
    sub->add_option("--threads", common.threads,
                    "worker threads (default: OPE_SHRINK_THREADS or 1)")
        ->check(CLI::NonNegativeNumber);
  };
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "run supervised-to-bandit conditions");
  CLI::App* slate = app.add_subcommand("slate", "run the slate experiment");
  CLI::App* learn = app.add_subcommand("learn", "off-policy policy learning");
  CLI::App* selftest = app.add_subcommand("selftest", "quick sanity checks");
  add_common(evaluate, true);
  add_common(slate, true);
  add_common(learn, true);
  add_common(selftest, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (CLI::App* sub : {evaluate, slate, learn, selftest}) {
    if (sub->parsed() && sub->count("--seed") > 0) common.seed = seed;
  }

  try {
    if (selftest->parsed()) return RunSelftest(common.seed.value_or(0), out);
    const nlohmann::json config = LoadConfigFile(common.config_path);
    if (evaluate->parsed()) return RunEvaluate(config, common, out);
    if (slate->parsed()) return RunSlate(config, common, out);
    return RunLearn(config, common, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const OpeError& e) {
    err << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << '\n';
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace ope::cli
