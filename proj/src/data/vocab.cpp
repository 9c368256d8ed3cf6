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

#include "dgn/data/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "dgn/error.hpp"

namespace dgn::data {

Vocabulary::Vocabulary() {
  add_token("<pad>");
  add_token("<unk>");
}

void Vocabulary::add_token(const std::string& token) {
  if (token_ids_.contains(token)) throw FormatError("duplicate vocabulary token '" + token + "'");
  token_ids_.emplace(token, tokens_.size());
  tokens_.push_back(token);
}

void Vocabulary::add_charge(const std::string& label) {
  if (charge_ids_.contains(label)) return;
  charge_ids_.emplace(label, charges_.size());
  charges_.push_back(label);
}

Vocabulary Vocabulary::build(std::span<const CaseRecord> corpus, std::size_t min_count) {
  if (corpus.empty()) throw ContractError("build_vocab needs a nonempty corpus");
  if (min_count < 1) throw ContractError("build_vocab min-count must be at least 1");
  std::map<std::string, std::size_t> counts;
  std::set<std::string> labels;
  for (const CaseRecord& r : corpus) {
    for (const std::string& t : r.tokens) ++counts[t];
    labels.insert(r.charges.begin(), r.charges.end());
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [token, n] : counts)
    if (n >= min_count) kept.emplace_back(token, n);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary v;
  for (const auto& [token, n] : kept) v.add_token(token);
  for (const std::string& label : labels) v.add_charge(label);
  return v;
}

std::size_t Vocabulary::token_index(const std::string& token) const {
  auto it = token_ids_.find(token);
  return it == token_ids_.end() ? kUnkIndex : it->second;
}

std::vector<std::size_t> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(token_index(t));
  return ids;
}

std::size_t Vocabulary::charge_index(const std::string& label) const {
  auto it = charge_ids_.find(label);
  if (it == charge_ids_.end()) throw VocabularyError("unknown charge '" + label + "'");
  return it->second;
}

void Vocabulary::save(const std::filesystem::path& token_file,
                      const std::filesystem::path& charge_file) const {
  std::ofstream tokens(token_file, std::ios::binary);
  if (!tokens) throw FormatError("cannot write " + token_file.string());
  for (std::size_t i = 2; i < tokens_.size(); ++i) tokens << tokens_[i] << '\n';
  std::ofstream charges(charge_file, std::ios::binary);
  if (!charges) throw FormatError("cannot write " + charge_file.string());
  for (const std::string& c : charges_) charges << c << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& token_file,
                            const std::filesystem::path& charge_file) {
  std::ifstream tokens(token_file, std::ios::binary);
  if (!tokens) throw FormatError("cannot read " + token_file.string());
  std::ifstream charges(charge_file, std::ios::binary);
  if (!charges) throw FormatError("cannot read " + charge_file.string());
  Vocabulary v;
  std::string line;
  while (std::getline(tokens, line)) {
    if (line.empty()) throw FormatError("empty token line in " + token_file.string());
    v.add_token(line);
  }
  while (std::getline(charges, line)) {
    if (line.empty()) throw FormatError("empty charge line in " + charge_file.string());
    v.add_charge(line);
  }
  return v;
}

}  // namespace dgn::data
