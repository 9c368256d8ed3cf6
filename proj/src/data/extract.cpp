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

#include "dgn/data/extract.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <tuple>

#include <boost/regex.hpp>

#include "dgn/error.hpp"

namespace dgn::data {

struct ExtractionPatterns::Compiled {
  std::vector<boost::regex> regexes;
};

struct PatternAccess {
  static const std::vector<boost::regex>& regexes(const ExtractionPatterns& p) {
    return p.compiled_->regexes;
  }
};

ExtractionPatterns::ExtractionPatterns(std::vector<std::string> sources)
    : sources_(std::move(sources)) {
  if (sources_.empty()) throw ConfigError("at least one extraction pattern is required");
  auto compiled = std::make_shared<Compiled>();
  for (const std::string& src : sources_) {
    boost::regex re;
    try {
      re.assign(src, boost::regex::perl);
    } catch (const boost::regex_error& e) {
      throw ConfigError("pattern does not compile: " + src + " (" + e.what() + ")");
    }
    if (src.find("(?<charge>") == std::string::npos || src.find("(?<months>") == std::string::npos)
      throw ConfigError("pattern lacks the named groups 'charge' and 'months': " + src);
    compiled->regexes.push_back(std::move(re));
  }
  compiled_ = std::move(compiled);
}

ExtractionPatterns::~ExtractionPatterns() = default;
ExtractionPatterns::ExtractionPatterns(const ExtractionPatterns&) = default;
ExtractionPatterns& ExtractionPatterns::operator=(const ExtractionPatterns&) = default;

ExtractionPatterns ExtractionPatterns::standard() {
  return ExtractionPatterns(
      {R"(sentenced to (?<months>\d+) months imprisonment for (?<charge>[a-z][a-z ]*?)\s*[.;])"});
}

ExtractionPatterns ExtractionPatterns::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open pattern file " + path.string());
  std::vector<std::string> sources;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    sources.push_back(line);
  }
  return ExtractionPatterns(std::move(sources));
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

struct Match {
  std::size_t begin;
  std::size_t end;
  std::size_t pattern;
  std::string charge;
  std::string months;
};

}  // namespace

ExtractResult extract_record(std::string_view judgment, const ExtractionPatterns& patterns) {
  if (judgment.empty()) throw ContractError("extract_record needs nonempty judgment text");
  const auto& regexes = PatternAccess::regexes(patterns);
  const std::string text(judgment);

  std::vector<Match> matches;
  for (std::size_t k = 0; k < regexes.size(); ++k) {
    for (boost::sregex_iterator it(text.begin(), text.end(), regexes[k]), end; it != end; ++it) {
      const boost::smatch& m = *it;
      matches.push_back({static_cast<std::size_t>(m.position(std::size_t{0})),
                         static_cast<std::size_t>(m.position(std::size_t{0}) + m.length(std::size_t{0})), k,
                         trim(m["charge"].str()), m["months"].str()});
    }
  }
  std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
    return std::tie(a.begin, a.pattern) < std::tie(b.begin, b.pattern);
  });

  ExtractResult result;
  std::size_t covered = 0;
  for (const Match& m : matches) {
    if (m.begin < covered) continue;  // overlaps an earlier match
    covered = m.end;
    long months = 0;
    const auto [ptr, ec] = std::from_chars(m.months.data(), m.months.data() + m.months.size(), months);
    if (ec != std::errc() || ptr != m.months.data() + m.months.size() || months < kMinTerm ||
        months > kMaxTerm) {
      result.rejected = RejectReason::kOutOfRange;
      result.detail = "term '" + m.months + "' outside [1,240] for charge '" + m.charge + "'";
      result.fragments.clear();
      return result;
    }
    result.fragments.push_back({m.charge, static_cast<int>(months)});
  }
  return result;
}

}  // namespace dgn::data
