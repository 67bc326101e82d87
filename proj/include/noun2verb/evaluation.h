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

// Metrics and baselines: top-k accuracy, cumulative-accuracy ROC curves, KL
// divergence, the subset-KL protocol, decade-binned precision, frequency and
// random baselines, and grouped breakdowns.

#ifndef NOUN2VERB_EVALUATION_H_
#define NOUN2VERB_EVALUATION_H_

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "noun2verb/data.h"
#include "noun2verb/inference.h"
#include "noun2verb/random.h"

namespace noun2verb {

struct MeanSe {
  double mean = 0.0;
  double standard_error = 0.0;  // Sample sd / sqrt(n); 0 when n = 1.
  std::size_t n = 0;
};

MeanSe MeanAndStandardError(std::span<const double> values);

struct MetricReport {
  std::string metric;
  double value = 0.0;
  double standard_error = 0.0;
  std::string group;
  std::size_t sample_size = 0;
};

std::string MetricReportsToCsv(const std::vector<MetricReport> &reports);

// Optional inflected-form -> lemma map ("form<TAB>lemma" lines).
class LemmaMap {
 public:
  LemmaMap() = default;
  explicit LemmaMap(std::map<std::string, std::string> forms) : forms_(std::move(forms)) {}
  static LemmaMap Parse(const std::string &text);
  static LemmaMap Load(const std::string &path);

  std::string Apply(const std::string &token) const;

 private:
  std::map<std::string, std::string> forms_;
};

bool TopKHit(std::span<const std::string> ranked, const std::set<std::string> &gold, int k);
MeanSe TopKAccuracy(const std::vector<std::vector<std::string>> &predictions,
                    const std::vector<std::set<std::string>> &golds, int k);

struct RocCurve {
  std::vector<double> accuracy;  // accuracy[k - 1] for k = 1..k_max.
  double auc = 0.0;

  std::string ToCsv() const;  // "k,accuracy"
};

// Cumulative top-k accuracy for k = 1..k_max. The AUC is the trapezoidal
// area of the polyline through ((k - 1) / (k_max - 1), accuracy), so an
// oracle scores 1; with k_max = 1 it is the top-1 accuracy.
RocCurve RocAuc(const std::vector<std::vector<std::string>> &predictions,
                const std::vector<std::set<std::string>> &golds, int k_max);

struct KlOptions {
  double epsilon = 1e-6;     // Floor applied to Q on P's support.
  bool renormalize = true;   // Renormalize floored Q over P's support.
};

// sum_x P(x) log(P(x) / Q(x)) over entries with P(x) > 0, natural log.
// Entries of p must be nonnegative; p and q are parallel.
double KlDivergence(std::span<const double> p, std::span<const double> q,
                    const KlOptions &options = {});
// P validated as a distribution; q maps each support item to its model
// probability.
double KlDivergence(const AnnotationDistribution &p,
                    const std::function<double(const std::string &)> &q,
                    const KlOptions &options = {});

inline constexpr std::size_t kDefaultSubsetSize = 55;
inline constexpr std::size_t kDefaultSubsetCount = 100;

// Mean of per-subset mean KL over seeded draws without replacement, with
// the standard error across subsets.
MeanSe SubsetKl(std::span<const double> per_example_kl,
                std::size_t subset_size = kDefaultSubsetSize,
                std::size_t n_subsets = kDefaultSubsetCount, std::uint64_t seed = 0);

// Ranks by marginal training frequencies, independent of the query:
// vote-weighted counts for V and R, occurrence counts over supervised and
// unsupervised utterances for D and C.
class FrequencyBaseline {
 public:
  explicit FrequencyBaseline(const Dataset &train);

  double VerbProbability(const std::string &verb) const;
  double RelationProbability(Relation relation) const;
  double DenominalProbability(const std::string &token) const;
  double ContextProbability(const std::string &token) const;

  RankedList<Interpretation> Comprehend(const std::vector<std::string> &verbs,
                                        const std::vector<Relation> &relations) const;
  RankedList<Utterance> Produce(const std::vector<Utterance> &candidates) const;

 private:
  std::map<std::string, double> verb_, denominal_, context_;
  std::map<Relation, double> relation_;
};

// Uniform scores in a seeded random order.
template <typename T>
RankedList<T> RandomRanking(std::vector<T> items, Rng &rng) {
  rng.Shuffle(items);
  RankedList<T> out;
  for (auto &item : items) out.push_back({std::move(item), 1.0 / static_cast<double>(items.size())});
  return out;
}

enum class DecadeCriterion { kNextDecade, kAnyFuture };

struct StampedUtterance {
  Utterance utterance;
  std::optional<int> decade;
};

struct WordPredictions {
  std::string word;
  int change_decade = 0;  // Decade of the change point.
  std::vector<Utterance> predictions;
  std::vector<StampedUtterance> gold;  // Post-change usages.
};

inline constexpr int kLastEvaluatedDecade = 1980;

// Precision = |predictions in gold| / |predictions|, averaged per change
// decade. Next-decade gold is the usages of the change decade itself; any
// future gold is every usage from the change decade on.
std::map<int, MeanSe> DecadePrecision(const std::vector<WordPredictions> &words,
                                      DecadeCriterion criterion,
                                      int last_decade = kLastEvaluatedDecade);

// Per-group mean and standard error, groups in sorted order.
std::vector<MetricReport> GroupedReport(const std::string &metric,
                                        std::span<const double> values,
                                        std::span<const std::string> groups);

}  // namespace noun2verb

#endif  // NOUN2VERB_EVALUATION_H_
