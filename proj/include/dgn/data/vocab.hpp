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

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dgn/data/record.hpp"

namespace dgn::data {

inline constexpr std::size_t kPadIndex = 0;
inline constexpr std::size_t kUnkIndex = 1;

// Token and charge-label indices. Token indices 0 and 1 are reserved for
// padding and unknown tokens.
class Vocabulary {
 public:
  Vocabulary();

  // Tokens seen at least `min_count` times, most frequent first, ties by
  // token order. Every charge label of the corpus is indexed in sorted order.
  static Vocabulary build(std::span<const CaseRecord> corpus, std::size_t min_count);

  // Token file: one token per line for indices 2, 3, ...; charge file: one
  // label per line for indices 0, 1, ...
  void save(const std::filesystem::path& token_file,
            const std::filesystem::path& charge_file) const;
  static Vocabulary load(const std::filesystem::path& token_file,
                         const std::filesystem::path& charge_file);

  std::size_t size() const { return tokens_.size(); }
  std::size_t charge_count() const { return charges_.size(); }

  // Unknown tokens map to kUnkIndex.
  std::size_t token_index(const std::string& token) const;
  std::vector<std::size_t> encode(std::span<const std::string> tokens) const;
  const std::string& token(std::size_t index) const { return tokens_.at(index); }

  // Throws VocabularyError for a label outside the charge inventory.
  std::size_t charge_index(const std::string& label) const;
  const std::string& charge(std::size_t index) const { return charges_.at(index); }
  const std::vector<std::string>& charges() const { return charges_; }

  void add_charge(const std::string& label);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.charges_ == b.charges_;
  }

 private:
  void add_token(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> token_ids_;
  std::vector<std::string> charges_;
  std::unordered_map<std::string, std::size_t> charge_ids_;
};

}  // namespace dgn::data
