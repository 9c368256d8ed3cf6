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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dgn/data/record.hpp"
#include "dgn/data/vocab.hpp"

namespace dgn::data {

// What one training instance predicts: the term of one charge of a case, or
// the case's total term (one instance per case, gold from total_term over
// the gold per-charge terms).
enum class Target { kCharge, kTotal };

struct Instance {
  std::size_t record = 0;       // index into the source records
  std::size_t charge_slot = 0;  // position within the record's charges
  std::vector<std::size_t> tokens;
  std::size_t charge = 0;  // charge index in the vocabulary (0 for kTotal)
  double gold = 0.0;
};

std::vector<Instance> make_instances(std::span<const CaseRecord> records, const Vocabulary& vocab,
                                     Target target = Target::kCharge);

// A padded group of instances. Token and mask matrices are size x steps,
// row-major by instance, PAD-filled past each instance's length.
struct Batch {
  std::size_t size = 0;
  std::size_t steps = 0;
  std::vector<std::size_t> tokens;
  std::vector<char> mask;
  std::vector<std::size_t> lengths;
  std::vector<std::size_t> charges;
  std::vector<double> gold;
  std::vector<std::size_t> records;
  std::vector<std::size_t> charge_slots;
  std::vector<std::string> case_ids;
};

struct BatchOptions {
  std::size_t batch_size = 32;
  // Padding floor; the widest convolution filter needs this many steps.
  std::size_t min_length = 5;
  // Shuffles instances before bucketing and the batch order afterwards.
  std::optional<std::uint64_t> shuffle_seed;
  // Sort by length before chunking so batches hold similar lengths.
  bool bucket_by_length = true;
  // Keep all instances of a case in one batch.
  bool keep_cases_together = false;
};

std::vector<Batch> make_batches(std::span<const CaseRecord> records, const Vocabulary& vocab,
                                const BatchOptions& options, Target target = Target::kCharge);

// Pads an explicit list of instances into one batch.
Batch pad_batch(std::span<const Instance> instances, std::span<const CaseRecord> records,
                std::size_t min_length);

}  // namespace dgn::data
