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

#include "dgn/data/batch.hpp"

#include <algorithm>

#include "dgn/error.hpp"
#include "dgn/objective.hpp"
#include "dgn/random.hpp"

namespace dgn::data {

std::vector<Instance> make_instances(std::span<const CaseRecord> records, const Vocabulary& vocab,
                                     Target target) {
  std::vector<Instance> out;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const CaseRecord& rec = records[r];
    if (auto reason = check_record(rec))
      throw ContractError("record '" + rec.id + "' is invalid: " +
                          std::string(reject_reason_name(*reason)));
    const std::vector<std::size_t> ids = vocab.encode(rec.tokens);
    if (target == Target::kTotal) {
      std::vector<double> gold(rec.terms.begin(), rec.terms.end());
      out.push_back({r, 0, ids, 0, objective::total_term(gold)});
      continue;
    }
    for (std::size_t j = 0; j < rec.charges.size(); ++j)
      out.push_back({r, j, ids, vocab.charge_index(rec.charges[j]),
                     static_cast<double>(rec.terms[j])});
  }
  return out;
}

Batch pad_batch(std::span<const Instance> instances, std::span<const CaseRecord> records,
                std::size_t min_length) {
  if (instances.empty()) throw ContractError("cannot pad an empty batch");
  std::size_t steps = min_length;
  for (const Instance& in : instances) steps = std::max(steps, in.tokens.size());

  Batch b;
  b.size = instances.size();
  b.steps = steps;
  b.tokens.assign(b.size * steps, kPadIndex);
  b.mask.assign(b.size * steps, 0);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& in = instances[i];
    std::copy(in.tokens.begin(), in.tokens.end(), b.tokens.begin() + static_cast<long>(i * steps));
    std::fill_n(b.mask.begin() + static_cast<long>(i * steps), in.tokens.size(), 1);
    b.lengths.push_back(in.tokens.size());
    b.charges.push_back(in.charge);
    b.gold.push_back(in.gold);
    b.records.push_back(in.record);
    b.charge_slots.push_back(in.charge_slot);
    b.case_ids.push_back(records[in.record].id);
  }
  return b;
}

std::vector<Batch> make_batches(std::span<const CaseRecord> records, const Vocabulary& vocab,
                                const BatchOptions& options, Target target) {
  if (options.batch_size < 1) throw ContractError("batch size must be at least 1");
  const std::vector<Instance> instances = make_instances(records, vocab, target);

  // Units are single instances, or all instances of one case.
  std::vector<std::vector<std::size_t>> units;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (options.keep_cases_together && !units.empty() &&
        instances[units.back().front()].record == instances[i].record)
      units.back().push_back(i);
    else
      units.push_back({i});
  }

  std::optional<Rng> rng;
  if (options.shuffle_seed) {
    rng.emplace(*options.shuffle_seed);
    rng->shuffle(units);
  }
  if (options.bucket_by_length)
    std::stable_sort(units.begin(), units.end(), [&](const auto& a, const auto& b) {
      return instances[a.front()].tokens.size() < instances[b.front()].tokens.size();
    });

  std::vector<Batch> batches;
  std::vector<Instance> current;
  auto flush = [&] {
    if (!current.empty()) batches.push_back(pad_batch(current, records, options.min_length));
    current.clear();
  };
  for (const auto& unit : units) {
    if (!current.empty() && current.size() + unit.size() > options.batch_size) flush();
    for (std::size_t i : unit) current.push_back(instances[i]);
  }
  flush();
  if (rng) rng->shuffle(batches);
  return batches;
}

}  // namespace dgn::data
