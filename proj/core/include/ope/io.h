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

#ifndef OPE_IO_H_
#define OPE_IO_H_

#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ope/data.h"
#include "ope/slate.h"
#include "ope/slate_experiment.h"

namespace ope {

// All loaders throw OpeError with kIoError for unreadable files and
// kParseError for malformed content.

// Dataset CSV `label,f0,f1,...` plus a JSON sidecar {"k": .., "feature_dim": ..}.
// Context ids are the zero-based row numbers.
FullInfoDataset LoadDataset(const std::string& csv_path,
                            const std::string& sidecar_path);
void SaveDataset(const FullInfoDataset& data, const std::string& csv_path,
                 const std::string& sidecar_path);

// Logged CSV `context_id,action,reward,propensity`; features are taken from
// the dataset row whose id matches context_id.
std::vector<LoggedSample> LoadLoggedSamples(const std::string& path,
                                            const FullInfoDataset& data);
void SaveLoggedSamples(std::span<const LoggedSample> samples,
                       const std::string& path);

// Relevance CSV `query_id,doc_id,relevance,f0,...`. Queries keep the order
// of first appearance and documents keep file order within a query.
RelevanceData LoadRelevance(const std::string& path);
void SaveRelevance(const RelevanceData& data, const std::string& path);

// Slate log CSV `query_id,epsilon,basis_index,reward,propensity`. Rows whose
// basis_index is outside the basis fail with kSpanViolation.
std::vector<LoggedSlateSample> LoadSlateLogs(const std::string& path,
                                             const SlateEnvironment& env);
void SaveSlateLogs(std::span<const LoggedSlateSample> samples,
                   const std::string& path);

// Shortest round-trip decimal form; "inf" for +infinity.
std::string FormatDouble(double value);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::span<const std::string_view> header);

  CsvWriter& Field(std::string_view value);
  CsvWriter& Field(double value);
  CsvWriter& Field(long long value);
  void EndRow();

 private:
  std::ostream& out_;
  bool first_ = true;
};

// Splits one CSV line on commas and trims surrounding whitespace.
std::vector<std::string_view> SplitCsvLine(std::string_view line);

}  // namespace ope

#endif  // OPE_IO_H_
