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

#include "noun2verb/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "noun2verb/errors.h"
#include "noun2verb/random.h"

namespace noun2verb {
namespace {

struct RelationInfo {
  Relation relation;
  std::string_view symbol;
  std::vector<std::string> words;
};

const std::vector<RelationInfo> &RelationTable() {
  static const std::vector<RelationInfo> table = {
      {Relation::kLocatumOn, "LOCATUM_ON", {"on", "onto", "in", "into", "to", "at"}},
      {Relation::kLocatumOut, "LOCATUM_OUT", {"out of", "out", "from", "of"}},
      {Relation::kLocationIn, "LOCATION_IN", {"on", "onto", "in", "into", "to", "at"}},
      {Relation::kLocationOut, "LOCATION_OUT", {"out of", "out", "from", "of"}},
      {Relation::kDuration, "DURATION", {"during"}},
      {Relation::kAgent, "AGENT", {"as", "like"}},
      {Relation::kGoal, "GOAL", {"become", "look like", "to be", "into"}},
      {Relation::kInstrument, "INSTRUMENT", {"with", "by", "using", "via", "through"}},
  };
  return table;
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int ParseInt(std::string_view field, const char *what, int line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw FormatError(std::string("bad ") + what + " '" + std::string(field) + "'",
                      line);
  }
  return value;
}

std::string RequireToken(std::string_view field, const char *what, int line) {
  std::string token = CaseFold(Trim(field));
  if (token.empty()) throw FormatError(std::string("empty ") + what, line);
  return token;
}

}  // namespace

std::string_view RelationSymbol(Relation relation) {
  return RelationTable()[static_cast<std::size_t>(relation)].symbol;
}

std::optional<Relation> ParseRelation(std::string_view symbol) {
  for (const auto &info : RelationTable()) {
    if (info.symbol == symbol) return info.relation;
  }
  return std::nullopt;
}

const std::vector<std::string> &RelationalWords(Relation relation) {
  return RelationTable()[static_cast<std::size_t>(relation)].words;
}

std::string RelationHeadWord(Relation relation) {
  const std::string &first = RelationalWords(relation).front();
  return first.substr(0, first.find(' '));
}

std::string_view SourceName(Source source) {
  switch (source) {
    case Source::kAdult: return "adult";
    case Source::kChild: return "child";
    case Source::kCorpus: return "corpus";
    case Source::kHistorical: return "historical";
  }
  return "corpus";
}

std::optional<Source> ParseSource(std::string_view name) {
  for (Source s : {Source::kAdult, Source::kChild, Source::kCorpus,
                   Source::kHistorical}) {
    if (SourceName(s) == name) return s;
  }
  return std::nullopt;
}

std::string ToString(const Utterance &u) {
  return u.denominal + " the " + u.context;
}

std::string ToString(const Interpretation &i) {
  return i.verb + "/" + std::string(RelationSymbol(i.relation));
}

std::vector<GoldInterpretation> SupervisedExample::RankedGold() const {
  std::vector<GoldInterpretation> ranked = gold;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const GoldInterpretation &a, const GoldInterpretation &b) {
                     if (a.votes != b.votes) return a.votes > b.votes;
                     return a.interpretation < b.interpretation;
                   });
  return ranked;
}

void Dataset::AddUnsupervised(Utterance u, std::optional<int> decade) {
  unsupervised.push_back(std::move(u));
  unsupervised_decades.push_back(decade);
}

void AnnotationDistribution::Validate() const {
  if (support.size() != probabilities.size()) {
    throw ContractError("distribution support and probabilities differ in size");
  }
  if (support.empty()) throw ContractError("distribution has empty support");
  std::set<std::string> unique(support.begin(), support.end());
  if (unique.size() != support.size()) {
    throw ContractError("distribution support has repeated entries");
  }
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ContractError("distribution has a negative or non-finite entry");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ContractError("distribution sums to " + std::to_string(total));
  }
}

double AnnotationDistribution::ProbabilityOf(std::string_view item) const {
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] == item) return probabilities[i];
  }
  return 0.0;
}

Dataset ParseDataset(std::string_view text, const std::string &origin) {
  Dataset dataset;
  std::set<Utterance> seen_sup, seen_unsup;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty() || line.front() == '#') continue;

    auto fields = SplitTabs(line);
    Utterance u;
    if (fields.size() < 2 || fields.size() > 6) {
      throw FormatError("expected 2-3 (unsupervised) or 4-6 (supervised) "
                        "tab-separated fields, got " +
                            std::to_string(fields.size()),
                        line_no);
    }
    u.denominal = RequireToken(fields[0], "denominal verb", line_no);
    u.context = RequireToken(fields[1], "context", line_no);

    if (fields.size() <= 3) {
      if (!seen_unsup.insert(u).second) {
        throw FormatError("duplicate unsupervised pair '" + ToString(u) + "'",
                          line_no);
      }
      std::optional<int> decade;
      if (fields.size() == 3) decade = ParseInt(Trim(fields[2]), "decade", line_no);
      dataset.AddUnsupervised(std::move(u), decade);
      continue;
    }

    SupervisedExample ex;
    ex.utterance = u;
    auto relation = ParseRelation(Trim(fields[2]));
    if (!relation) {
      throw FormatError("unknown relation symbol '" + std::string(fields[2]) + "'",
                        line_no);
    }
    std::string_view gold = Trim(fields[3]);
    std::set<std::string> verbs;
    int total = 0;
    while (!gold.empty()) {
      std::size_t comma = gold.find(',');
      std::string_view entry = Trim(gold.substr(0, comma));
      gold = comma == std::string_view::npos ? std::string_view()
                                             : gold.substr(comma + 1);
      std::size_t colon = entry.rfind(':');
      if (colon == std::string_view::npos) {
        throw FormatError("gold entry '" + std::string(entry) +
                              "' is not verb:count",
                          line_no);
      }
      GoldInterpretation g;
      g.interpretation.verb = RequireToken(entry.substr(0, colon), "gold verb", line_no);
      g.interpretation.relation = *relation;
      g.votes = ParseInt(entry.substr(colon + 1), "vote count", line_no);
      if (g.votes < 0) throw FormatError("negative vote count", line_no);
      if (!verbs.insert(g.interpretation.verb).second) {
        throw FormatError("repeated gold verb '" + g.interpretation.verb + "'",
                          line_no);
      }
      total += g.votes;
      ex.gold.push_back(std::move(g));
    }
    if (ex.gold.empty()) throw FormatError("no gold verbs", line_no);
    if (total == 0) throw FormatError("all vote counts are zero", line_no);
    if (fields.size() >= 5) {
      auto source = ParseSource(Trim(fields[4]));
      if (!source) {
        throw FormatError("unknown source '" + std::string(fields[4]) + "'", line_no);
      }
      ex.source = *source;
    }
    if (fields.size() == 6) ex.decade = ParseInt(Trim(fields[5]), "decade", line_no);
    if (!seen_sup.insert(u).second) {
      throw FormatError("duplicate supervised pair '" + ToString(u) + "'", line_no);
    }
    dataset.supervised.push_back(std::move(ex));
  }
  if (dataset.empty()) {
    throw FormatError("no records in " + (origin.empty() ? "input" : origin));
  }
  return dataset;
}

Dataset LoadDataset(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open dataset '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseDataset(buf.str(), path);
}

std::string SerializeDataset(const Dataset &dataset) {
  std::ostringstream out;
  for (const auto &ex : dataset.supervised) {
    out << ex.utterance.denominal << '\t' << ex.utterance.context << '\t'
        << RelationSymbol(ex.gold.front().interpretation.relation) << '\t';
    for (std::size_t i = 0; i < ex.gold.size(); ++i) {
      if (i > 0) out << ',';
      out << ex.gold[i].interpretation.verb << ':' << ex.gold[i].votes;
    }
    if (ex.source != Source::kCorpus || ex.decade) out << '\t' << SourceName(ex.source);
    if (ex.decade) out << '\t' << *ex.decade;
    out << '\n';
  }
  for (std::size_t i = 0; i < dataset.unsupervised.size(); ++i) {
    const auto &u = dataset.unsupervised[i];
    out << u.denominal << '\t' << u.context;
    if (i < dataset.unsupervised_decades.size() && dataset.unsupervised_decades[i]) {
      out << '\t' << *dataset.unsupervised_decades[i];
    }
    out << '\n';
  }
  return out.str();
}

void WriteDataset(const std::string &path, const Dataset &dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write dataset '" + path + "'");
  out << SerializeDataset(dataset);
}

void MergeInto(Dataset &target, const Dataset &other) {
  std::set<Utterance> sup, unsup;
  for (const auto &ex : target.supervised) sup.insert(ex.utterance);
  for (const auto &u : target.unsupervised) unsup.insert(u);
  for (const auto &ex : other.supervised) {
    if (!sup.insert(ex.utterance).second) {
      throw FormatError("duplicate supervised pair '" + ToString(ex.utterance) + "'");
    }
    target.supervised.push_back(ex);
  }
  for (std::size_t i = 0; i < other.unsupervised.size(); ++i) {
    if (!unsup.insert(other.unsupervised[i]).second) {
      throw FormatError("duplicate unsupervised pair '" +
                        ToString(other.unsupervised[i]) + "'");
    }
    target.AddUnsupervised(other.unsupervised[i],
                           i < other.unsupervised_decades.size()
                               ? other.unsupervised_decades[i]
                               : std::nullopt);
  }
}

AnnotationDistribution EmpiricalDistribution(const SupervisedExample &example) {
  double total = 0.0;
  for (const auto &g : example.gold) total += g.votes;
  if (!(total > 0.0)) throw ContractError("example has no votes");
  AnnotationDistribution dist;
  for (const auto &g : example.gold) {
    if (g.votes <= 0) continue;
    dist.support.push_back(g.interpretation.verb);
    dist.probabilities.push_back(g.votes / total);
  }
  return dist;
}

std::vector<Fold> KFoldSplit(const Dataset &dataset, int k, std::uint64_t seed) {
  const std::size_t n = dataset.supervised.size();
  if (k < 2) throw ContractError("k-fold split needs k >= 2");
  if (static_cast<std::size_t>(k) > n) {
    throw ContractError("k-fold split with k=" + std::to_string(k) + " over " +
                        std::to_string(n) + " supervised examples");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(order);

  std::vector<Fold> folds(k);
  std::size_t base = n / k, extra = n % k, start = 0;
  for (int f = 0; f < k; ++f) {
    std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    std::vector<bool> in_test(n, false);
    for (std::size_t i = start; i < start + len; ++i) in_test[order[i]] = true;
    Fold &fold = folds[f];
    fold.test_indices.assign(order.begin() + start, order.begin() + start + len);
    std::sort(fold.test_indices.begin(), fold.test_indices.end());
    for (std::size_t i = 0; i < n; ++i) {
      (in_test[i] ? fold.test : fold.train).supervised.push_back(dataset.supervised[i]);
    }
    fold.train.unsupervised = dataset.unsupervised;
    fold.train.unsupervised_decades = dataset.unsupervised_decades;
    start += len;
  }
  return folds;
}

std::map<Interpretation, std::vector<Utterance>> GroupByInterpretation(
    const Dataset &dataset) {
  std::map<Interpretation, std::vector<Utterance>> groups;
  for (const auto &ex : dataset.supervised) {
    for (const auto &g : ex.gold) {
      groups[g.interpretation].push_back(ex.utterance);
    }
  }
  return groups;
}

Vocabulary BuildVocabulary(const Dataset &dataset) {
  Vocabulary vocab;
  for (const auto &ex : dataset.supervised) {
    vocab.Add(ex.utterance.denominal, kNounCandidate);
    vocab.Add(ex.utterance.context, kContextCandidate);
    for (const auto &g : ex.gold) vocab.Add(g.interpretation.verb, kVerbCandidate);
  }
  for (const auto &u : dataset.unsupervised) {
    vocab.Add(u.denominal, kNounCandidate);
    vocab.Add(u.context, kContextCandidate);
  }
  for (Relation r : kAllRelations) {
    for (const auto &phrase : RelationalWords(r)) {
      std::istringstream words(phrase);
      std::string w;
      while (words >> w) vocab.Add(w, kRelationWord);
    }
  }
  return vocab;
}

void ExcludeVerbCandidates(Vocabulary &vocab,
                           const std::vector<std::string> &targets) {
  for (const auto &t : targets) vocab.RemoveRole(t, kVerbCandidate);
}

}  // namespace noun2verb
