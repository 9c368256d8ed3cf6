// Copyright 2026 The DGN Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dgn/data/record.hpp"

// JSON Lines persistence: one case per line with fields `id`, `fact`
// (raw text), `charges` (string list) and `terms` (integer list).

namespace dgn::data {

struct LoadReport {
  std::vector<CaseRecord> records;
  std::vector<std::pair<std::size_t, RejectReason>> rejects;  // (1-based line, reason)

  std::map<std::string, std::size_t> reject_counts() const;
};

LoadReport parse_jsonl(std::istream& in, const Tokenizer& tokenizer = tokenize);
LoadReport load_jsonl(const std::filesystem::path& path, const Tokenizer& tokenizer = tokenize);

std::string to_json_line(const CaseRecord& record);
void write_jsonl(const std::filesystem::path& path, std::span<const CaseRecord> records);

// Judgment documents for the extraction pipeline: JSON Lines with `id`,
// `fact` and `judgment`.
struct JudgmentDoc {
  std::string id;
  std::string fact;
  std::string judgment;
};

void write_judgments(const std::filesystem::path& path, std::span<const JudgmentDoc> docs);
std::vector<JudgmentDoc> load_judgments(const std::filesystem::path& path);

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<CaseRecord> train;
  std::vector<CaseRecord> valid;
  std::vector<CaseRecord> test;
};

// Seeded shuffle, then contiguous slices sized round(n * ratio) for train
// and valid; test takes the remainder. Each slice is re-sorted by case id.
DatasetSplit split_dataset(std::vector<CaseRecord> records, const SplitRatios& ratios,
                           std::uint64_t seed);

}  // namespace dgn::data
