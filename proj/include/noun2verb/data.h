// Copyright 2026 The Noun2Verb Authors.
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

// Denominal utterances, their interpretations and the on-disk record format.
//
// Records are tab-separated, one per line; '#' starts a comment line.
//   supervised:   D <TAB> C <TAB> RELATION <TAB> verb:votes,verb:votes
//                 [<TAB> source [<TAB> decade]]
//   unsupervised: D <TAB> C [<TAB> decade]
// source is one of adult|child|corpus|historical (default corpus); decade is
// an integer year such as 1880.

#ifndef NOUN2VERB_DATA_H_
#define NOUN2VERB_DATA_H_

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noun2verb/lexicon.h"

namespace noun2verb {

enum class Relation : std::uint8_t {
  kLocatumOn,
  kLocatumOut,
  kLocationIn,
  kLocationOut,
  kDuration,
  kAgent,
  kGoal,
  kInstrument,
};

inline constexpr std::size_t kNumRelations = 8;
inline constexpr std::array<Relation, kNumRelations> kAllRelations = {
    Relation::kLocatumOn,  Relation::kLocatumOut, Relation::kLocationIn,
    Relation::kLocationOut, Relation::kDuration,  Relation::kAgent,
    Relation::kGoal,       Relation::kInstrument,
};

std::string_view RelationSymbol(Relation relation);
std::optional<Relation> ParseRelation(std::string_view symbol);
// Relational words (possibly multi-word phrases) that signal the relation.
const std::vector<std::string> &RelationalWords(Relation relation);
// Single token standing for the relation when it is embedded.
std::string RelationHeadWord(Relation relation);

enum class Source : std::uint8_t { kAdult, kChild, kCorpus, kHistorical };
std::string_view SourceName(Source source);
std::optional<Source> ParseSource(std::string_view name);

struct Utterance {
  std::string denominal;  // D, the noun used as a verb.
  std::string context;    // C, its single-word object.

  auto operator<=>(const Utterance &) const = default;
};

struct Interpretation {
  std::string verb;  // V, the paraphrase verb.
  Relation relation = Relation::kLocatumOn;

  auto operator<=>(const Interpretation &) const = default;
};

std::string ToString(const Utterance &u);       // "porch the newspaper"
std::string ToString(const Interpretation &i);  // "drop/LOCATION_IN"

struct GoldInterpretation {
  Interpretation interpretation;
  int votes = 0;
};

struct SupervisedExample {
  Utterance utterance;
  std::vector<GoldInterpretation> gold;
  Source source = Source::kCorpus;
  std::optional<int> decade;

  // Gold entries by votes descending, ties broken lexicographically.
  std::vector<GoldInterpretation> RankedGold() const;
};

struct Dataset {
  std::vector<SupervisedExample> supervised;
  std::vector<Utterance> unsupervised;
  // Decade stamps for unsupervised records, parallel to unsupervised.
  std::vector<std::optional<int>> unsupervised_decades;

  bool empty() const { return supervised.empty() && unsupervised.empty(); }
  void AddUnsupervised(Utterance u, std::optional<int> decade = std::nullopt);
};

struct AnnotationDistribution {
  std::vector<std::string> support;
  std::vector<double> probabilities;

  // Throws ContractError unless probabilities are >= 0, sum to 1 within 1e-9
  // and the support has no repeats.
  void Validate() const;
  double ProbabilityOf(std::string_view item) const;
};

// Parses a record file. Malformed lines raise FormatError with the line number.
Dataset LoadDataset(const std::string &path);
Dataset ParseDataset(std::string_view text, const std::string &origin = "");
std::string SerializeDataset(const Dataset &dataset);
void WriteDataset(const std::string &path, const Dataset &dataset);
// Appends the records of other; duplicate (D, C) pairs are a FormatError.
void MergeInto(Dataset &target, const Dataset &other);

// Vote-proportional distribution over the example's voted verbs.
AnnotationDistribution EmpiricalDistribution(const SupervisedExample &example);

struct Fold {
  Dataset train;
  Dataset test;  // Supervised only.
  std::vector<std::size_t> test_indices;
};

// k disjoint test folds of size floor(n/k) or ceil(n/k) covering the
// supervised set; unsupervised data always goes to the training side.
std::vector<Fold> KFoldSplit(const Dataset &dataset, int k, std::uint64_t seed);

// Every utterance listed under each gold interpretation it carries.
std::map<Interpretation, std::vector<Utterance>> GroupByInterpretation(
    const Dataset &dataset);

// Tags D as noun candidate, C as context candidate, gold verbs as verb
// candidates and relational words as relation words.
Vocabulary BuildVocabulary(const Dataset &dataset);
// Leakage control: target denominal verbs lose their verb-candidate tag.
void ExcludeVerbCandidates(Vocabulary &vocab,
                           const std::vector<std::string> &targets);

}  // namespace noun2verb

#endif  // NOUN2VERB_DATA_H_
