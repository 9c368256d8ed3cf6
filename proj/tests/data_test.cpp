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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dgn/data/batch.hpp"
#include "dgn/data/dataset.hpp"
#include "dgn/data/extract.hpp"
#include "dgn/data/record.hpp"
#include "dgn/data/synth.hpp"
#include "dgn/data/vocab.hpp"
#include "dgn/error.hpp"

namespace dgn::data {
namespace {

using Tokens = std::vector<std::string>;

CaseRecord make_record(std::string id, std::string fact, Tokens charges, std::vector<int> terms) {
  CaseRecord r;
  r.id = std::move(id);
  r.fact = std::move(fact);
  r.tokens = tokenize(r.fact);
  r.charges = std::move(charges);
  r.terms = std::move(terms);
  return r;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("dgn_data_test_" + name);
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("a b  c"), (Tokens{"a", "b", "c"}));
  EXPECT_EQ(tokenize("Theft, knife."), (Tokens{"theft", ",", "knife", "."}));
  EXPECT_EQ(tokenize(""), Tokens{});
  EXPECT_EQ(tokenize("\xe7\x9b\x97\xe7\xaa\x83 X"), (Tokens{"\xe7\x9b\x97\xe7\xaa\x83", "x"}));
}

TEST(Vocabulary, BuildOrdersByFrequencyThenToken) {
  const std::vector<CaseRecord> corpus = {make_record("1", "a a b", {"theft"}, {3})};
  const Vocabulary v2 = Vocabulary::build(corpus, 2);
  EXPECT_EQ(v2.size(), 3u);
  EXPECT_EQ(v2.token(0), "<pad>");
  EXPECT_EQ(v2.token(1), "<unk>");
  EXPECT_EQ(v2.token_index("a"), 2u);
  EXPECT_EQ(v2.token_index("b"), kUnkIndex);

  const Vocabulary v1 = Vocabulary::build(corpus, 1);
  EXPECT_EQ(v1.token_index("b"), 3u);

  const std::vector<CaseRecord> ties = {make_record("1", "z y x", {"fraud", "arson"}, {1, 2})};
  const Vocabulary vt = Vocabulary::build(ties, 1);
  EXPECT_EQ(vt.token(2), "x");
  EXPECT_EQ(vt.token(4), "z");
  EXPECT_EQ(vt.charge_index("arson"), 0u);
  EXPECT_EQ(vt.charge_index("fraud"), 1u);
  EXPECT_THROW(vt.charge_index("piracy"), VocabularyError);
}

TEST(Vocabulary, RejectsBadArguments) {
  EXPECT_THROW(Vocabulary::build({}, 1), ContractError);
  const std::vector<CaseRecord> corpus = {make_record("1", "a", {"theft"}, {3})};
  EXPECT_THROW(Vocabulary::build(corpus, 0), ContractError);
}

TEST(Vocabulary, SaveLoadRoundTrip) {
  const auto cases = gen_synthetic(SynthSpec::standard(4), 50);
  std::vector<CaseRecord> corpus;
  for (const auto& c : cases) corpus.push_back(c.record);
  const Vocabulary v = Vocabulary::build(corpus, 1);
  v.save(temp_path("tokens.txt"), temp_path("charges.txt"));
  const Vocabulary back = Vocabulary::load(temp_path("tokens.txt"), temp_path("charges.txt"));
  EXPECT_EQ(back, v);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(back.token_index(v.token(i)), i);

  std::ifstream tokens(temp_path("tokens.txt"));
  std::string first;
  std::getline(tokens, first);
  EXPECT_EQ(first, v.token(2));  // line number = index - 2
}

TEST(Extract, TemplateMatchesInDocumentOrder) {
  const auto patterns = ExtractionPatterns::standard();
  auto one = extract_record("The court: sentenced to 24 months imprisonment for theft.", patterns);
  ASSERT_FALSE(one.rejected);
  EXPECT_EQ(one.fragments, (std::vector<SentenceFragment>{{"theft", 24}}));

  auto two = extract_record(
      "sentenced to 36 months imprisonment for drug trafficking. then sentenced to 6 months "
      "imprisonment for theft.",
      patterns);
  EXPECT_EQ(two.fragments,
            (std::vector<SentenceFragment>{{"drug trafficking", 36}, {"theft", 6}}));

  auto none = extract_record("the defendant was acquitted.", patterns);
  EXPECT_TRUE(none.fragments.empty());
  EXPECT_FALSE(none.rejected);
}

TEST(Extract, OutOfRangeTermRejectsRecord) {
  const auto patterns = ExtractionPatterns::standard();
  for (const char* text : {"sentenced to 500 months imprisonment for theft.",
                           "sentenced to 0 months imprisonment for theft.",
                           "sentenced to 99999999999999999999 months imprisonment for theft."}) {
    auto r = extract_record(text, patterns);
    ASSERT_TRUE(r.rejected) << text;
    EXPECT_EQ(*r.rejected, RejectReason::kOutOfRange);
    EXPECT_TRUE(r.fragments.empty());
  }
  EXPECT_THROW(extract_record("", patterns), ContractError);
}

TEST(Extract, PatternFileAndValidation) {
  const auto path = temp_path("patterns.txt");
  {
    std::ofstream out(path);
    out << "# alternate phrasing\n"
        << R"(for (?<charge>[a-z ]+?): (?<months>\d+) months)" << "\n\n"
        << R"(sentenced to (?<months>\d+) months imprisonment for (?<charge>[a-z ]+?)\.)" << "\n";
  }
  const auto patterns = ExtractionPatterns::load(path);
  EXPECT_EQ(patterns.sources().size(), 2u);
  auto r = extract_record("for fraud: 12 months. sentenced to 3 months imprisonment for arson.",
                          patterns);
  EXPECT_EQ(r.fragments, (std::vector<SentenceFragment>{{"fraud", 12}, {"arson", 3}}));

  EXPECT_THROW(ExtractionPatterns({"(unclosed"}), ConfigError);
  EXPECT_THROW(ExtractionPatterns({R"((?<months>\d+))"}), ConfigError);
  EXPECT_THROW(ExtractionPatterns(std::vector<std::string>{}), ConfigError);
}

TEST(Synth, DegenerateSpecYieldsBaseTerm) {
  SynthSpec spec;
  spec.charges = {{"theft", 17, {"stole"}}};
  spec.distractors = {"the", "street"};
  spec.charges_per_case = {1.0};
  spec.max_modifiers_per_clause = 0;
  for (const auto& c : gen_synthetic(spec, 40)) EXPECT_EQ(c.record.terms, std::vector<int>{17});
}

TEST(Synth, ModifierScalesBaseTerm) {
  SynthSpec spec;
  spec.charges = {{"theft", 12, {"stole"}}};
  spec.modifiers = {{"repeatedly", 2.0}};
  spec.distractors = {"the"};
  spec.charges_per_case = {1.0};
  spec.max_modifiers_per_clause = 1;
  spec.stray_modifier_rate = 0.0;
  std::set<int> seen;
  for (const auto& c : gen_synthetic(spec, 60)) {
    const bool modified = std::count(c.record.tokens.begin(), c.record.tokens.end(), "repeatedly");
    EXPECT_EQ(c.record.terms[0], modified ? 24 : 12);
    seen.insert(c.record.terms[0]);
  }
  EXPECT_EQ(seen, (std::set<int>{12, 24}));
}

TEST(Synth, ClampsToTermRange) {
  SynthSpec spec;
  spec.charges = {{"arson", 200, {"torched"}}, {"theft", 1, {"stole"}}};
  spec.modifiers = {{"massive", 3.0}, {"minor", 0.1}};
  spec.distractors = {"the"};
  spec.charges_per_case = {1.0};
  for (const auto& c : gen_synthetic(spec, 100))
    for (int t : c.record.terms) EXPECT_TRUE(t >= kMinTerm && t <= kMaxTerm);
}

TEST(Synth, SameSeedSameCorpus) {
  const auto a = gen_synthetic(SynthSpec::standard(7), 200);
  const auto b = gen_synthetic(SynthSpec::standard(7), 200);
  const auto c = gen_synthetic(SynthSpec::standard(8), 200);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].record, b[i].record);
    EXPECT_EQ(a[i].judgment, b[i].judgment);
    differs |= !(a[i].record == c[i].record);
  }
  EXPECT_TRUE(differs);
}

TEST(Synth, RecordsSatisfyInvariantsAndRoundTripThroughExtraction) {
  const auto patterns = ExtractionPatterns::standard();
  for (const auto& c : gen_synthetic(SynthSpec::standard(3), 300)) {
    EXPECT_FALSE(check_record(c.record)) << c.record.id;
    const auto r = extract_record(c.judgment, patterns);
    ASSERT_FALSE(r.rejected);
    ASSERT_EQ(r.fragments.size(), c.record.charges.size());
    for (std::size_t j = 0; j < r.fragments.size(); ++j) {
      EXPECT_EQ(r.fragments[j].charge, c.record.charges[j]);
      EXPECT_EQ(r.fragments[j].months, c.record.terms[j]);
    }
  }
}

TEST(Synth, InconsistentSpecIsRejected) {
  SynthSpec spec = SynthSpec::standard(1);
  spec.charges[1].keywords.push_back(spec.charges[0].keywords[0]);
  EXPECT_THROW(gen_synthetic(spec, 1), ConfigError);
  spec = SynthSpec::standard(1);
  spec.modifiers[0].second = 0.0;
  EXPECT_THROW(gen_synthetic(spec, 1), ConfigError);
  spec = SynthSpec::standard(1);
  spec.charges[0].base_term = 241;
  EXPECT_THROW(gen_synthetic(spec, 1), ConfigError);
  EXPECT_THROW(gen_synthetic(SynthSpec::standard(1), 0), ContractError);
}

TEST(Dataset, JsonlRoundTripAndRejectCounts) {
  std::vector<CaseRecord> records;
  for (const auto& c : gen_synthetic(SynthSpec::standard(5), 20)) records.push_back(c.record);
  const auto path = temp_path("cases.jsonl");
  write_jsonl(path, records);
  const LoadReport back = load_jsonl(path);
  EXPECT_TRUE(back.rejects.empty());
  EXPECT_EQ(back.records, records);

  std::istringstream bad(
      "{\"id\":\"a\",\"fact\":\"x\",\"charges\":[\"theft\"],\"terms\":[500]}\n"
      "not json\n"
      "{\"id\":\"b\",\"fact\":\"x\",\"charges\":[\"theft\"]}\n"
      "{\"id\":\"c\",\"fact\":\"  \",\"charges\":[\"theft\"],\"terms\":[3]}\n"
      "{\"id\":\"d\",\"fact\":\"x\",\"charges\":[\"theft\",\"fraud\"],\"terms\":[3]}\n"
      "{\"id\":\"e\",\"fact\":\"x\",\"charges\":[],\"terms\":[]}\n"
      "{\"id\":\"f\",\"fact\":\"ok\",\"charges\":[\"theft\"],\"terms\":[3]}\n"
      "{\"id\":\"f\",\"fact\":\"ok\",\"charges\":[\"theft\"],\"terms\":[4]}\n"
      "{\"id\":\"g\",\"fact\":\"x\",\"charges\":[\"theft\"],\"terms\":[2.5]}\n");
  const LoadReport report = parse_jsonl(bad);
  ASSERT_EQ(report.records.size(), 1u);
  EXPECT_EQ(report.records[0].id, "f");
  const auto counts = report.reject_counts();
  EXPECT_EQ(counts, (std::map<std::string, std::size_t>{{"out-of-range", 1},
                                                         {"malformed", 2},
                                                         {"missing-field", 1},
                                                         {"empty-fact", 1},
                                                         {"misaligned", 1},
                                                         {"no-charges", 1},
                                                         {"duplicate-id", 1}}));
}

TEST(Dataset, SplitFollowsRatiosWithoutOverlap) {
  std::vector<CaseRecord> records;
  for (const auto& c : gen_synthetic(SynthSpec::standard(6), 2500)) records.push_back(c.record);
  const DatasetSplit split = split_dataset(records, {}, 11);
  EXPECT_EQ(split.train.size(), 2000u);
  EXPECT_EQ(split.valid.size(), 250u);
  EXPECT_EQ(split.test.size(), 250u);
  std::set<std::string> ids;
  for (const auto* part : {&split.train, &split.valid, &split.test})
    for (const CaseRecord& r : *part) EXPECT_TRUE(ids.insert(r.id).second) << r.id;
  EXPECT_EQ(ids.size(), 2500u);
  EXPECT_THROW(split_dataset(records, {0.5, 0.5, 0.5}, 1), ConfigError);
}

TEST(Batching, PadsAndMasks) {
  const std::vector<CaseRecord> records = {make_record("1", "a b c", {"theft"}, {3}),
                                           make_record("2", "a b c d e", {"fraud"}, {9})};
  const Vocabulary v = Vocabulary::build(records, 1);
  BatchOptions opts;
  opts.batch_size = 8;
  const auto batches = make_batches(records, v, opts);
  ASSERT_EQ(batches.size(), 1u);
  const Batch& b = batches[0];
  EXPECT_EQ(b.steps, 5u);
  EXPECT_EQ(b.mask, (std::vector<char>{1, 1, 1, 0, 0, 1, 1, 1, 1, 1}));
  EXPECT_EQ(b.tokens[3], kPadIndex);
  EXPECT_EQ(b.gold, (std::vector<double>{3, 9}));
}

TEST(Batching, ShortInstancePaddedToMinimumLength) {
  const std::vector<CaseRecord> records = {make_record("1", "a b", {"theft"}, {3})};
  const Vocabulary v = Vocabulary::build(records, 1);
  const auto batches = make_batches(records, v, {});
  ASSERT_EQ(batches.size(), 1u);
  EXPECT_EQ(batches[0].steps, 5u);
  EXPECT_EQ(batches[0].mask, (std::vector<char>{1, 1, 0, 0, 0}));
}

TEST(Batching, MultiChargeCaseSharesTokenRow) {
  const std::vector<CaseRecord> records = {
      make_record("1", "x y z", {"theft", "fraud", "arson"}, {3, 4, 5})};
  const Vocabulary v = Vocabulary::build(records, 1);
  const auto batches = make_batches(records, v, {});
  ASSERT_EQ(batches.size(), 1u);
  const Batch& b = batches[0];
  ASSERT_EQ(b.size, 3u);
  for (std::size_t i = 1; i < 3; ++i)
    EXPECT_TRUE(std::equal(b.tokens.begin(), b.tokens.begin() + 5, b.tokens.begin() + i * 5));
  EXPECT_EQ(b.charges, (std::vector<std::size_t>{2, 1, 0}));

  const auto total = make_batches(records, v, {}, Target::kTotal);
  ASSERT_EQ(total[0].size, 1u);
  EXPECT_EQ(total[0].gold[0], 8.5);  // (5 + 12) / 2
}

TEST(Batching, LosslessAndDeterministic) {
  std::vector<CaseRecord> records;
  for (const auto& c : gen_synthetic(SynthSpec::standard(9), 150)) records.push_back(c.record);
  const Vocabulary v = Vocabulary::build(records, 1);
  for (bool together : {false, true}) {
    BatchOptions opts;
    opts.batch_size = 7;
    opts.shuffle_seed = 42;
    opts.keep_cases_together = together;
    const auto batches = make_batches(records, v, opts);
    std::multiset<std::pair<std::size_t, std::size_t>> seen;
    for (const Batch& b : batches) {
      EXPECT_LE(b.size, 7u);
      EXPECT_GE(b.steps, 5u);
      for (std::size_t i = 0; i < b.size; ++i) {
        seen.insert({b.records[i], b.charge_slots[i]});
        for (std::size_t t = 0; t < b.steps; ++t)
          EXPECT_EQ(b.mask[i * b.steps + t] != 0, t < b.lengths[i]);
      }
      if (together) {
        std::map<std::size_t, std::size_t> per_case;
        for (std::size_t r : b.records) ++per_case[r];
        for (auto [r, n] : per_case) EXPECT_EQ(n, records[r].charges.size());
      }
    }
    std::multiset<std::pair<std::size_t, std::size_t>> expected;
    for (std::size_t r = 0; r < records.size(); ++r)
      for (std::size_t j = 0; j < records[r].charges.size(); ++j) expected.insert({r, j});
    EXPECT_EQ(seen, expected);

    const auto again = make_batches(records, v, opts);
    ASSERT_EQ(again.size(), batches.size());
    for (std::size_t i = 0; i < batches.size(); ++i) EXPECT_EQ(again[i].tokens, batches[i].tokens);
  }
}

TEST(Batching, UnknownTokensMapToUnk) {
  const std::vector<CaseRecord> train = {make_record("1", "a b", {"theft"}, {3})};
  const std::vector<CaseRecord> test = {make_record("2", "a zzz", {"theft"}, {3})};
  const Vocabulary v = Vocabulary::build(train, 1);
  const auto batches = make_batches(test, v, {});
  EXPECT_EQ(batches[0].tokens[1], kUnkIndex);
}

}  // namespace
}  // namespace dgn::data
