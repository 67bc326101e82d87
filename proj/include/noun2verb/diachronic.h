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

// Noun-to-verb POS ratio time series and permutation-tested mean-shift
// change-point detection.
//
// Counts file: CSV "word,year,noun_count,verb_count", optional header row.

#ifndef NOUN2VERB_DIACHRONIC_H_
#define NOUN2VERB_DIACHRONIC_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noun2verb/data.h"
#include "noun2verb/evaluation.h"

namespace noun2verb {

struct PosTimeSeries {
  std::string word;
  std::vector<int> years;  // Strictly increasing.
  std::vector<long long> noun_counts;
  std::vector<long long> verb_counts;

  void Validate() const;
};

// Series in word order, years sorted.
std::vector<PosTimeSeries> ParseCounts(const std::string &text);
std::vector<PosTimeSeries> LoadCounts(const std::string &path);

struct RatioSeries {
  std::vector<int> years;
  std::vector<double> ratio;         // noun / (noun + verb)
  std::vector<int> dropped_years;  // Zero-total years.
};

RatioSeries NounRatio(const PosTimeSeries &series);

enum class FrequencyMode {
  kTotal,    // Totals of noun and of verb counts each exceed theta.
  kPerYear,  // Every year's noun + verb count exceeds theta.
};

inline constexpr long long kDefaultFrequencyThreshold = 500;

std::vector<PosTimeSeries> FrequencyFilter(const std::vector<PosTimeSeries> &series,
                                           long long theta_f,
                                           FrequencyMode mode = FrequencyMode::kTotal);

// Population z-score; a constant series maps to zeros.
std::vector<double> NormalizeZscore(std::span<const double> q);

struct ChangePointConfig {
  int permutations = 1000;
  double alpha = 0.05;
  std::size_t min_segment = 5;
  std::uint64_t seed = 0;
};

struct MeanShift {
  std::size_t index = 0;  // First element of the second segment.
  double statistic = 0.0;
};

// argmax_t |mean(z[0, t)) - mean(z[t, n))| over pivots leaving at least
// min_segment points on each side; the earliest pivot wins ties.
MeanShift MeanShiftScan(std::span<const double> z, std::size_t min_segment);

struct ChangePointTest {
  MeanShift shift;
  double p_value = 1.0;  // Fraction of permutations with max statistic >= observed.
};

ChangePointTest TestChangePoint(std::span<const double> z, const ChangePointConfig &config);

struct ChangePoint {
  std::string word;
  int year = 0;
  std::size_t index = 0;
  double p_value = 1.0;
  double statistic = 0.0;
};

// Ratio, z-score and test; returns a change point iff p < alpha.
std::optional<ChangePoint> DetectChangePoint(const PosTimeSeries &series,
                                             const ChangePointConfig &config);

std::string ChangePointsToCsv(const std::vector<ChangePoint> &points);
// "word,year,ratio,z" rows for plotting.
std::string ZSeriesToCsv(const std::vector<PosTimeSeries> &series);

inline int DecadeOf(int year) { return year >= 0 ? year / 10 * 10 : -((-year + 9) / 10 * 10); }

struct WordPartition {
  std::string word;
  int change_decade = 0;
  // Records before the change decade: conventional usages.
  std::vector<SupervisedExample> pre_records;
  std::vector<Interpretation> pre_interpretations;
  // Usages from the change decade on: novel usages to predict.
  std::vector<StampedUtterance> post_usages;
};

struct SplitResult {
  std::vector<WordPartition> partitions;
  std::vector<std::string> warnings;
};

// Partitions records of each denominal verb around its change decade.
// Words without a change point are skipped with a warning; words with no
// post-change usage are excluded. Records for partitioned words must carry
// decades.
SplitResult SplitByChangePoint(const Dataset &dataset,
                               const std::map<std::string, int> &change_decades);

}  // namespace noun2verb

#endif  // NOUN2VERB_DIACHRONIC_H_
