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

#include "dgn/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dgn/error.hpp"
#include "dgn/random.hpp"

namespace dgn::data {

SynthSpec SynthSpec::standard(std::uint64_t seed) {
  SynthSpec s;
  s.charges = {
      {"theft", 10, {"stole", "pilfered"}},
      {"fraud", 24, {"defrauded", "swindled"}},
      {"robbery", 48, {"robbed", "mugged"}},
      {"intentional injury", 18, {"assaulted", "stabbed"}},
      {"drug trafficking", 72, {"trafficked", "smuggled"}},
      {"embezzlement", 30, {"embezzled", "misappropriated"}},
      {"arson", 40, {"torched", "ignited"}},
      {"bribery", 20, {"bribed", "kickbacks"}},
  };
  s.modifiers = {{"repeatedly", 2.0}, {"armed", 1.5},     {"violently", 1.75},
                 {"massive", 2.5},    {"organized", 1.4}, {"confessed", 0.7},
                 {"compensated", 0.6}, {"minor", 0.5}};
  s.distractors = {"the",   "on",      "day",     "witness", "police", "reported", "in",
                   "a",     "street",  "market",  "later",   "said",   "that",     "was",
                   "seen",  "near",    "house",   "at",      "night",  "after",    "vehicle",
                   "money", "phone",   "village", "county",  "office", "morning",  "with",
                   "his",   "friend"};
  s.seed = seed;
  return s;
}

void SynthSpec::validate() const {
  if (charges.empty()) throw ConfigError("synthetic spec has no charges");
  if (distractors.empty()) throw ConfigError("synthetic spec has no distractor words");
  if (charges_per_case.empty() || charges_per_case.size() > charges.size())
    throw ConfigError("charges-per-case weights must cover 1..number of charges at most");
  double weight = 0.0;
  for (double w : charges_per_case) {
    if (w < 0.0) throw ConfigError("charges-per-case weights must be nonnegative");
    weight += w;
  }
  if (!(weight > 0.0)) throw ConfigError("charges-per-case weights sum to zero");
  if (max_modifiers_per_clause < 0 || static_cast<std::size_t>(max_modifiers_per_clause) > modifiers.size())
    throw ConfigError("max modifiers per clause exceeds the modifier lexicon");
  if (min_distractor_sentences < 0 || max_distractor_sentences < min_distractor_sentences)
    throw ConfigError("distractor sentence range is empty");
  if (stray_modifier_rate < 0.0 || stray_modifier_rate > 1.0)
    throw ConfigError("stray modifier rate must lie in [0,1]");

  std::set<std::string> seen_keywords, labels;
  for (const ChargeSpec& c : charges) {
    if (c.label.empty() || !labels.insert(c.label).second)
      throw ConfigError("charge labels must be nonempty and unique");
    if (c.base_term < kMinTerm || c.base_term > kMaxTerm)
      throw ConfigError("base term of '" + c.label + "' outside [1,240]");
    if (c.keywords.empty()) throw ConfigError("charge '" + c.label + "' has no keywords");
    for (const std::string& k : c.keywords)
      if (!seen_keywords.insert(k).second)
        throw ConfigError("keyword '" + k + "' is shared between charges");
  }
  std::set<std::string> modifier_words;
  for (const auto& [word, factor] : modifiers) {
    if (!(factor > 0.0)) throw ConfigError("modifier factor for '" + word + "' must be positive");
    if (seen_keywords.contains(word) || !modifier_words.insert(word).second)
      throw ConfigError("modifier '" + word + "' collides with another word");
  }
  for (const std::string& d : distractors)
    if (seen_keywords.contains(d) || modifier_words.contains(d))
      throw ConfigError("distractor '" + d + "' collides with a keyword or modifier");
}

std::string render_sentence(const std::string& charge, int months) {
  return "the defendant is sentenced to " + std::to_string(months) +
         " months imprisonment for " + charge + ".";
}

namespace {

template <typename T>
const T& pick(const std::vector<T>& items, Rng& rng) {
  return items[rng.index(items.size())];
}

std::size_t draw_charge_count(const std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i + 1;
    u -= weights[i];
  }
  return weights.size();
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const std::string& w : words) {
    if (w == "." || w == ",") {
      out += w;
      continue;
    }
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

void add_fillers(std::vector<std::string>& out, const SynthSpec& spec, Rng& rng, int lo, int hi) {
  const int n = lo + static_cast<int>(rng.index(static_cast<std::uint64_t>(hi - lo + 1)));
  for (int i = 0; i < n; ++i) out.push_back(pick(spec.distractors, rng));
}

}  // namespace

std::vector<SynthCase> gen_synthetic(const SynthSpec& spec, std::size_t count) {
  if (count < 1) throw ContractError("gen_synthetic needs count >= 1");
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t width = std::max<std::size_t>(6, std::to_string(count).size());

  std::vector<SynthCase> cases;
  cases.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const std::size_t k = draw_charge_count(spec.charges_per_case, rng);
    std::vector<std::size_t> pool(spec.charges.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    rng.shuffle(pool);
    pool.resize(k);

    CaseRecord record;
    const std::string ordinal = std::to_string(n + 1);
    record.id = "case-" + std::string(width - std::min<std::size_t>(width, ordinal.size()), '0') + ordinal;

    std::vector<std::vector<std::string>> sentences;
    for (std::size_t c : pool) {
      const ChargeSpec& charge = spec.charges[c];
      std::vector<std::size_t> mods(spec.modifiers.size());
      for (std::size_t i = 0; i < mods.size(); ++i) mods[i] = i;
      rng.shuffle(mods);
      mods.resize(rng.index(static_cast<std::uint64_t>(spec.max_modifiers_per_clause) + 1));

      std::vector<std::string> clause = {"the", "defendant", pick(charge.keywords, rng)};
      add_fillers(clause, spec, rng, 1, 3);
      double factor = 1.0;
      for (std::size_t m : mods) {
        clause.push_back(spec.modifiers[m].first);
        factor *= spec.modifiers[m].second;
        add_fillers(clause, spec, rng, 0, 1);
      }
      clause.push_back(".");
      sentences.push_back(std::move(clause));

      const long term = std::lround(charge.base_term * factor);
      record.charges.push_back(charge.label);
      record.terms.push_back(static_cast<int>(std::clamp<long>(term, kMinTerm, kMaxTerm)));
    }

    const int distractor_count =
        spec.min_distractor_sentences +
        static_cast<int>(rng.index(static_cast<std::uint64_t>(
            spec.max_distractor_sentences - spec.min_distractor_sentences + 1)));
    for (int d = 0; d < distractor_count; ++d) {
      std::vector<std::string> sentence;
      add_fillers(sentence, spec, rng, 4, 8);
      if (!spec.modifiers.empty() && rng.bernoulli(spec.stray_modifier_rate))
        sentence.insert(sentence.begin() + static_cast<long>(rng.index(sentence.size())),
                        pick(spec.modifiers, rng).first);
      sentence.push_back(".");
      sentences.push_back(std::move(sentence));
    }
    rng.shuffle(sentences);

    std::vector<std::string> words;
    for (auto& s : sentences) words.insert(words.end(), s.begin(), s.end());
    record.fact = join(words);
    record.tokens = tokenize(record.fact);

    SynthCase out;
    for (std::size_t j = 0; j < record.charges.size(); ++j) {
      if (j > 0) out.judgment += ' ';
      out.judgment += render_sentence(record.charges[j], record.terms[j]);
    }
    out.record = std::move(record);
    cases.push_back(std::move(out));
  }
  return cases;
}

}  // namespace dgn::data
