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

#include "dgn/data/record.hpp"

#include <cctype>

namespace dgn::data {

std::string_view reject_reason_name(RejectReason reason) {
  switch (reason) {
    case RejectReason::kMalformed: return "malformed";
    case RejectReason::kMissingField: return "missing-field";
    case RejectReason::kEmptyFact: return "empty-fact";
    case RejectReason::kNoCharges: return "no-charges";
    case RejectReason::kMisaligned: return "misaligned";
    case RejectReason::kOutOfRange: return "out-of-range";
    case RejectReason::kDuplicateId: return "duplicate-id";
  }
  return "unknown";
}

std::optional<RejectReason> check_record(const CaseRecord& record) {
  if (record.tokens.empty()) return RejectReason::kEmptyFact;
  if (record.charges.empty()) return RejectReason::kNoCharges;
  if (record.charges.size() != record.terms.size()) return RejectReason::kMisaligned;
  for (int t : record.terms)
    if (t < kMinTerm || t > kMaxTerm) return RejectReason::kOutOfRange;
  return std::nullopt;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      flush();
      tokens.emplace_back(1, ch);
    } else {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  flush();
  return tokens;
}

}  // namespace dgn::data
