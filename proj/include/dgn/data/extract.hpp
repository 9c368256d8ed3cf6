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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dgn/data/record.hpp"

namespace dgn::data {

// Compiled sentence patterns. Each pattern must define the named capture
// groups `charge` and `months`.
class ExtractionPatterns {
 public:
  explicit ExtractionPatterns(std::vector<std::string> sources);
  ~ExtractionPatterns();
  ExtractionPatterns(const ExtractionPatterns&);
  ExtractionPatterns& operator=(const ExtractionPatterns&);

  // Matches "sentenced to <N> months imprisonment for <charge>."
  static ExtractionPatterns standard();
  // One pattern per line; blank lines and lines starting with '#' skipped.
  static ExtractionPatterns load(const std::filesystem::path& path);

  const std::vector<std::string>& sources() const { return sources_; }

 private:
  friend struct PatternAccess;
  struct Compiled;
  std::vector<std::string> sources_;
  std::shared_ptr<const Compiled> compiled_;
};

struct SentenceFragment {
  std::string charge;
  int months = 0;

  friend bool operator==(const SentenceFragment&, const SentenceFragment&) = default;
};

struct ExtractResult {
  std::vector<SentenceFragment> fragments;  // document order
  std::optional<RejectReason> rejected;
  std::string detail;
};

// All non-overlapping matches of any pattern, in document order. A term
// outside [1, 240] rejects the whole record. Zero matches is not an error.
ExtractResult extract_record(std::string_view judgment, const ExtractionPatterns& patterns);

}  // namespace dgn::data
