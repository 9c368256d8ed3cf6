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
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dgn/data/record.hpp"

namespace dgn::data {

struct ChargeSpec {
  std::string label;
  int base_term = 12;  // months, in [1, 240]
  std::vector<std::string> keywords;
};

// Recipe for a synthetic corpus. Each charge of a case is described by one
// clause that opens with one of the charge's keywords and carries zero or
// more severity modifiers; the gold term is the base term scaled by the
// product of those modifiers' factors, rounded and clamped to [1, 240].
// Clauses are interleaved with distractor sentences drawn from a lexicon
// shared by all charges.
struct SynthSpec {
  std::vector<ChargeSpec> charges;
  std::vector<std::pair<std::string, double>> modifiers;  // word -> factor
  std::vector<std::string> distractors;
  // Weight of drawing k = i + 1 charges for a case.
  std::vector<double> charges_per_case = {0.5, 0.35, 0.15};
  int max_modifiers_per_clause = 2;
  int min_distractor_sentences = 1;
  int max_distractor_sentences = 3;
  // Chance that a distractor sentence mentions a modifier word that applies
  // to no charge.
  double stray_modifier_rate = 0.25;
  std::uint64_t seed = 1;

  // Eight charges, eight modifiers and a thirty-word distractor lexicon.
  static SynthSpec standard(std::uint64_t seed);
  // Throws ConfigError on an inconsistent recipe.
  void validate() const;
};

struct SynthCase {
  CaseRecord record;
  std::string judgment;  // one sentencing sentence per charge
};

// Fully determined by (spec, count).
std::vector<SynthCase> gen_synthetic(const SynthSpec& spec, std::size_t count);

// Sentencing sentence understood by ExtractionPatterns::standard().
std::string render_sentence(const std::string& charge, int months);

}  // namespace dgn::data
