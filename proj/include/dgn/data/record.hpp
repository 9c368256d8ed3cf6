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

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dgn::data {

inline constexpr int kMinTerm = 1;
inline constexpr int kMaxTerm = 240;

// One case: the fact description, its charges and the gold term in months
// for each charge (aligned by position).
struct CaseRecord {
  std::string id;
  std::string fact;
  std::vector<std::string> tokens;
  std::vector<std::string> charges;
  std::vector<int> terms;

  friend bool operator==(const CaseRecord&, const CaseRecord&) = default;
};

enum class RejectReason {
  kMalformed,
  kMissingField,
  kEmptyFact,
  kNoCharges,
  kMisaligned,
  kOutOfRange,
  kDuplicateId,
};

std::string_view reject_reason_name(RejectReason reason);

// First broken invariant of a record, if any.
std::optional<RejectReason> check_record(const CaseRecord& record);

// Splits text into lowercase tokens. Whitespace separates tokens and every
// ASCII punctuation character becomes a token of its own; bytes >= 0x80 are
// treated as word characters, so UTF-8 text passes through unchanged.
std::vector<std::string> tokenize(std::string_view text);

// Pluggable tokenizer; a segmenter for unspaced scripts can be dropped in.
using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

}  // namespace dgn::data
