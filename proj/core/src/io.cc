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

#include "ope/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"
#include "ope/error.h"

namespace ope {
namespace {

std::string_view Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

class CsvReader {
 public:
  explicit CsvReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) Fail(ErrorCode::kIoError, "cannot open " + path);
    std::string line;
    if (!std::getline(in_, line)) {
      Fail(ErrorCode::kParseError, path + ": missing header");
    }
    for (std::string_view name : SplitCsvLine(line)) header_.emplace_back(name);
  }

  const std::vector<std::string>& header() const { return header_; }

  // Next non-blank row; false at end of file.
  bool Next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
      ++line_number_;
      if (Trim(line_).empty()) continue;
      fields = SplitCsvLine(line_);
      if (fields.size() != header_.size()) {
        Error("expected " + std::to_string(header_.size()) + " fields, got " +
              std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void Error(const std::string& what) const {
    Fail(ErrorCode::kParseError,
         path_ + ":" + std::to_string(line_number_ + 1) + ": " + what);
  }

  double Real(std::string_view field) const {
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() ||
        !std::isfinite(value)) {
      Error("bad number '" + std::string(field) + "'");
    }
    return value;
  }

  int64_t Integer(std::string_view field) const {
    int64_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      Error("bad integer '" + std::string(field) + "'");
    }
    return value;
  }

  void ExpectHeader(std::span<const std::string_view> leading) const {
    if (header_.size() < leading.size()) Error("header too short");
    for (size_t i = 0; i < leading.size(); ++i) {
      if (header_[i] != leading[i]) {
        Fail(ErrorCode::kParseError, path_ + ": header column " +
                                         std::to_string(i) + " must be '" +
                                         std::string(leading[i]) + "'");
      }
    }
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  std::string line_;
  size_t line_number_ = 0;
};

std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path);
  return out;
}

void WriteFeatureHeader(std::vector<std::string>& names, int dim) {
  for (int j = 0; j < dim; ++j) names.push_back("f" + std::to_string(j));
}

}  // namespace

std::vector<std::string_view> SplitCsvLine(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      return fields;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string FormatDouble(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

CsvWriter::CsvWriter(std::ostream& out,
                     std::span<const std::string_view> header)
    : out_(out) {
  for (std::string_view name : header) Field(name);
  EndRow();
}

CsvWriter& CsvWriter::Field(std::string_view value) {
  if (!first_) out_ << ',';
  out_ << value;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::Field(double value) { return Field(FormatDouble(value)); }

CsvWriter& CsvWriter::Field(long long value) {
  return Field(std::to_string(value));
}

void CsvWriter::EndRow() {
  out_ << '\n';
  first_ = true;
}

FullInfoDataset LoadDataset(const std::string& csv_path,
                            const std::string& sidecar_path) {
  std::ifstream side(sidecar_path);
  if (!side) Fail(ErrorCode::kIoError, "cannot open " + sidecar_path);
  FullInfoDataset data;
  try {
    const nlohmann::json meta = nlohmann::json::parse(side);
    data.num_actions = meta.at("k").get<int>();
    data.feature_dim = meta.at("feature_dim").get<int>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kParseError, sidecar_path + ": " + e.what());
  }
  if (data.num_actions < 1 || data.feature_dim < 0) {
    Fail(ErrorCode::kParseError, sidecar_path + ": k and feature_dim invalid");
  }

  CsvReader reader(csv_path);
  const std::string_view label = "label";
  reader.ExpectHeader(std::span(&label, 1));
  if (reader.header().size() != static_cast<size_t>(data.feature_dim) + 1) {
    Fail(ErrorCode::kParseError,
         csv_path + ": header has " +
             std::to_string(reader.header().size() - 1) +
             " features but sidecar says " + std::to_string(data.feature_dim));
  }
  std::vector<std::string_view> fields;
  while (reader.Next(fields)) {
    const int64_t y = reader.Integer(fields[0]);
    if (y < 0 || y >= data.num_actions) {
      reader.Error("label " + std::to_string(y) + " outside [0, k)");
    }
    Context ctx;
    ctx.id = static_cast<int64_t>(data.contexts.size());
    ctx.features.reserve(data.feature_dim);
    for (size_t j = 1; j < fields.size(); ++j) {
      ctx.features.push_back(reader.Real(fields[j]));
    }
    data.contexts.push_back(std::move(ctx));
    data.labels.push_back(static_cast<int>(y));
  }
  if (data.contexts.empty()) {
    Fail(ErrorCode::kParseError, csv_path + ": no rows");
  }
  return data;
}

void SaveDataset(const FullInfoDataset& data, const std::string& csv_path,
                 const std::string& sidecar_path) {
  {
    std::ofstream side = OpenForWrite(sidecar_path);
    side << nlohmann::json{{"k", data.num_actions},
                           {"feature_dim", data.feature_dim}}
                .dump()
         << '\n';
  }
  std::ofstream out = OpenForWrite(csv_path);
  std::vector<std::string> names{"label"};
  WriteFeatureHeader(names, data.feature_dim);
  std::vector<std::string_view> header(names.begin(), names.end());
  CsvWriter csv(out, header);
  for (size_t i = 0; i < data.size(); ++i) {
    csv.Field(static_cast<long long>(data.labels[i]));
    for (double f : data.contexts[i].features) csv.Field(f);
    csv.EndRow();
  }
}

std::vector<LoggedSample> LoadLoggedSamples(const std::string& path,
                                            const FullInfoDataset& data) {
  std::map<int64_t, size_t> row_of;
  for (size_t i = 0; i < data.size(); ++i) row_of[data.contexts[i].id] = i;
  CsvReader reader(path);
  static constexpr std::string_view kHeader[] = {"context_id", "action",
                                                 "reward", "propensity"};
  reader.ExpectHeader(kHeader);
  std::vector<LoggedSample> samples;
  std::vector<std::string_view> fields;
  while (reader.Next(fields)) {
    LoggedSample s;
    const int64_t id = reader.Integer(fields[0]);
    const auto it = row_of.find(id);
    if (it == row_of.end()) {
      reader.Error("unknown context_id " + std::to_string(id));
    }
    s.context = data.contexts[it->second];
    const int64_t action = reader.Integer(fields[1]);
    if (action < 0 || action >= data.num_actions) {
      reader.Error("action " + std::to_string(action) + " outside [0, k)");
    }
    s.action = static_cast<int>(action);
    s.reward = reader.Real(fields[2]);
    s.propensity = reader.Real(fields[3]);
    if (s.reward < 0.0 || s.reward > 1.0) reader.Error("reward outside [0, 1]");
    if (!(s.propensity > 0.0 && s.propensity <= 1.0)) {
      reader.Error("propensity outside (0, 1]");
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

void SaveLoggedSamples(std::span<const LoggedSample> samples,
                       const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  static constexpr std::string_view kHeader[] = {"context_id", "action",
                                                 "reward", "propensity"};
  CsvWriter csv(out, kHeader);
  for (const LoggedSample& s : samples) {
    csv.Field(static_cast<long long>(s.context.id))
        .Field(static_cast<long long>(s.action))
        .Field(s.reward)
        .Field(s.propensity)
        .EndRow();
  }
}

RelevanceData LoadRelevance(const std::string& path) {
  CsvReader reader(path);
  static constexpr std::string_view kHeader[] = {"query_id", "doc_id",
                                                 "relevance"};
  reader.ExpectHeader(kHeader);
  const int d = static_cast<int>(reader.header().size()) - 3;
  std::vector<int64_t> order;
  std::map<int64_t, std::vector<std::pair<double, std::vector<double>>>> docs;
  std::vector<std::string_view> fields;
  while (reader.Next(fields)) {
    const int64_t q = reader.Integer(fields[0]);
    reader.Integer(fields[1]);
    const double rel = reader.Real(fields[2]);
    if (rel < 0.0) reader.Error("negative relevance");
    std::vector<double> f;
    f.reserve(d);
    for (size_t j = 3; j < fields.size(); ++j) f.push_back(reader.Real(fields[j]));
    auto [it, inserted] = docs.try_emplace(q);
    if (inserted) order.push_back(q);
    it->second.emplace_back(rel, std::move(f));
  }
  if (order.empty()) Fail(ErrorCode::kParseError, path + ": no rows");
  RelevanceData data;
  data.feature_dim = d;
  for (int64_t q : order) {
    const auto& rows = docs[q];
    SlateQuery query;
    query.id = q;
    query.features.resize(static_cast<Eigen::Index>(rows.size()), d);
    for (size_t r = 0; r < rows.size(); ++r) {
      query.relevance.push_back(rows[r].first);
      for (int j = 0; j < d; ++j) query.features(r, j) = rows[r].second[j];
    }
    data.queries.push_back(std::move(query));
  }
  return data;
}

void SaveRelevance(const RelevanceData& data, const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  std::vector<std::string> names{"query_id", "doc_id", "relevance"};
  WriteFeatureHeader(names, data.feature_dim);
  std::vector<std::string_view> header(names.begin(), names.end());
  CsvWriter csv(out, header);
  for (const SlateQuery& q : data.queries) {
    for (Eigen::Index doc = 0; doc < q.features.rows(); ++doc) {
      csv.Field(static_cast<long long>(q.id))
          .Field(static_cast<long long>(doc))
          .Field(q.relevance[doc]);
      for (Eigen::Index j = 0; j < q.features.cols(); ++j) {
        csv.Field(q.features(doc, j));
      }
      csv.EndRow();
    }
  }
}

std::vector<LoggedSlateSample> LoadSlateLogs(const std::string& path,
                                             const SlateEnvironment& env) {
  CsvReader reader(path);
  static constexpr std::string_view kHeader[] = {
      "query_id", "epsilon", "basis_index", "reward", "propensity"};
  reader.ExpectHeader(kHeader);
  std::vector<LoggedSlateSample> samples;
  std::vector<std::string_view> fields;
  while (reader.Next(fields)) {
    LoggedSlateSample s;
    s.context_id = reader.Integer(fields[0]);
    if (!env.index_of.contains(s.context_id)) {
      reader.Error("unknown query_id " + std::to_string(s.context_id));
    }
    s.epsilon = reader.Real(fields[1]);
    const int64_t b = reader.Integer(fields[2]);
    if (b < 0 || b >= env.basis.size()) {
      Fail(ErrorCode::kSpanViolation,
           path + ": basis_index " + std::to_string(b) +
               " is outside the logging basis");
    }
    s.basis_index = static_cast<int>(b);
    s.reward = reader.Real(fields[3]);
    s.propensity = reader.Real(fields[4]);
    if (s.reward < 0.0 || s.reward > 1.0) reader.Error("reward outside [0, 1]");
    if (!(s.propensity > 0.0 && s.propensity <= 1.0)) {
      reader.Error("propensity outside (0, 1]");
    }
    samples.push_back(s);
  }
  return samples;
}

void SaveSlateLogs(std::span<const LoggedSlateSample> samples,
                   const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  static constexpr std::string_view kHeader[] = {
      "query_id", "epsilon", "basis_index", "reward", "propensity"};
  CsvWriter csv(out, kHeader);
  for (const LoggedSlateSample& s : samples) {
    csv.Field(static_cast<long long>(s.context_id))
        .Field(s.epsilon)
        .Field(static_cast<long long>(s.basis_index))
        .Field(s.reward)
        .Field(s.propensity)
        .EndRow();
  }
}

}  // namespace ope
