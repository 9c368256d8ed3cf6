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

#include "dgn/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>

#include <json.hpp>

#include "dgn/error.hpp"
#include "dgn/random.hpp"

namespace dgn::data {

using Json = nlohmann::ordered_json;

std::map<std::string, std::size_t> LoadReport::reject_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& [line, reason] : rejects) ++counts[std::string(reject_reason_name(reason))];
  return counts;
}

LoadReport parse_jsonl(std::istream& in, const Tokenizer& tokenizer) {
  LoadReport report;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      report.rejects.emplace_back(line_no, RejectReason::kMalformed);
      continue;
    }
    if (!j.contains("id") || !j.contains("fact") || !j.contains("charges") || !j.contains("terms")) {
      report.rejects.emplace_back(line_no, RejectReason::kMissingField);
      continue;
    }
    CaseRecord r;
    try {
      r.id = j["id"].get<std::string>();
      r.fact = j["fact"].get<std::string>();
      r.charges = j["charges"].get<std::vector<std::string>>();
      const auto terms = j["terms"];
      if (!terms.is_array()) throw FormatError("terms");
      for (const auto& t : terms) {
        if (!t.is_number_integer()) throw FormatError("term");
        const auto v = t.get<long long>();
        r.terms.push_back(static_cast<int>(std::clamp<long long>(v, -1, kMaxTerm + 1)));
      }
    } catch (const std::exception&) {
      report.rejects.emplace_back(line_no, RejectReason::kMalformed);
      continue;
    }
    r.tokens = tokenizer(r.fact);
    if (auto reason = check_record(r)) {
      report.rejects.emplace_back(line_no, *reason);
      continue;
    }
    if (!ids.insert(r.id).second) {
      report.rejects.emplace_back(line_no, RejectReason::kDuplicateId);
      continue;
    }
    report.records.push_back(std::move(r));
  }
  return report;
}

LoadReport load_jsonl(const std::filesystem::path& path, const Tokenizer& tokenizer) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read dataset " + path.string());
  return parse_jsonl(in, tokenizer);
}

std::string to_json_line(const CaseRecord& record) {
  Json j;
  j["id"] = record.id;
  j["fact"] = record.fact;
  j["charges"] = record.charges;
  j["terms"] = record.terms;
  return j.dump();
}

void write_jsonl(const std::filesystem::path& path, std::span<const CaseRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write dataset " + path.string());
  for (const CaseRecord& r : records) out << to_json_line(r) << '\n';
  if (!out) throw FormatError("write failed for " + path.string());
}

void write_judgments(const std::filesystem::path& path, std::span<const JudgmentDoc> docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const JudgmentDoc& d : docs) {
    Json j;
    j["id"] = d.id;
    j["fact"] = d.fact;
    j["judgment"] = d.judgment;
    out << j.dump() << '\n';
  }
}

std::vector<JudgmentDoc> load_judgments(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::vector<JudgmentDoc> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    try {
      if (j.is_discarded()) throw FormatError("json");
      docs.push_back({j.at("id").get<std::string>(), j.at("fact").get<std::string>(),
                      j.at("judgment").get<std::string>()});
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected an object with id, fact and judgment strings");
    }
  }
  return docs;
}

DatasetSplit split_dataset(std::vector<CaseRecord> records, const SplitRatios& ratios,
                           std::uint64_t seed) {
  if (ratios.train < 0 || ratios.valid < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9)
    throw ConfigError("split ratios must be nonnegative and sum to 1");
  Rng rng(seed);
  rng.shuffle(records);
  const std::size_t n = records.size();
  const auto n_train = static_cast<std::size_t>(std::llround(n * ratios.train));
  const auto n_valid = std::min(n - n_train, static_cast<std::size_t>(std::llround(n * ratios.valid)));

  DatasetSplit split;
  auto first = std::make_move_iterator(records.begin());
  split.train.assign(first, first + static_cast<long>(n_train));
  split.valid.assign(first + static_cast<long>(n_train), first + static_cast<long>(n_train + n_valid));
  split.test.assign(first + static_cast<long>(n_train + n_valid), std::make_move_iterator(records.end()));
  auto by_id = [](const CaseRecord& a, const CaseRecord& b) { return a.id < b.id; };
  std::sort(split.train.begin(), split.train.end(), by_id);
  std::sort(split.valid.begin(), split.valid.end(), by_id);
  std::sort(split.test.begin(), split.test.end(), by_id);
  return split;
}

}  // namespace dgn::data
