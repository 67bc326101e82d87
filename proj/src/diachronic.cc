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

#include "noun2verb/diachronic.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "noun2verb/errors.h"
#include "noun2verb/random.h"

namespace noun2verb {
namespace {

std::vector<std::string> SplitCsv(const std::string &line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    field.erase(0, field.find_first_not_of(" \t"));
    field.erase(field.find_last_not_of(" \t\r") + 1);
    out.push_back(field);
  }
  return out;
}

long long ParseCount(const std::string &s, int line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw FormatError("bad integer '" + s + "'", line);
  return v;
}

}  // namespace

void PosTimeSeries::Validate() const {
  if (years.size() != noun_counts.size() || years.size() != verb_counts.size()) {
    throw ContractError("series '" + word + "' has unequal lengths");
  }
  for (std::size_t i = 1; i < years.size(); ++i) {
    if (years[i] <= years[i - 1]) {
      throw ContractError("series '" + word + "' years are not strictly increasing");
    }
  }
  for (std::size_t i = 0; i < years.size(); ++i) {
    if (noun_counts[i] < 0 || verb_counts[i] < 0) {
      throw ContractError("series '" + word + "' has a negative count");
    }
  }
}

std::vector<PosTimeSeries> ParseCounts(const std::string &text) {
  struct Row {
    long long noun, verb;
    int line;
  };
  std::map<std::string, std::map<int, Row>> rows;
  std::istringstream lines(text);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    auto f = SplitCsv(line);
    if (n == 1 && !f.empty() && f[0] == "word") continue;
    if (f.size() != 4) throw FormatError("expected word,year,noun_count,verb_count", n);
    long long year = ParseCount(f[1], n);
    long long noun = ParseCount(f[2], n), verb = ParseCount(f[3], n);
    if (noun < 0 || verb < 0) throw FormatError("negative count", n);
    auto &series = rows[CaseFold(f[0])];
    if (!series.emplace(static_cast<int>(year), Row{noun, verb, n}).second) {
      throw FormatError("repeated year " + f[1] + " for '" + f[0] + "'", n);
    }
  }
  std::vector<PosTimeSeries> out;
  for (const auto &[word, years] : rows) {
    PosTimeSeries s;
    s.word = word;
    for (const auto &[year, row] : years) {
      s.years.push_back(year);
      s.noun_counts.push_back(row.noun);
      s.verb_counts.push_back(row.verb);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PosTimeSeries> LoadCounts(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open counts file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseCounts(buf.str());
}

RatioSeries NounRatio(const PosTimeSeries &series) {
  series.Validate();
  RatioSeries out;
  for (std::size_t i = 0; i < series.years.size(); ++i) {
    long long total = series.noun_counts[i] + series.verb_counts[i];
    if (total == 0) {
      out.dropped_years.push_back(series.years[i]);
      continue;
    }
    out.years.push_back(series.years[i]);
    out.ratio.push_back(static_cast<double>(series.noun_counts[i]) / static_cast<double>(total));
  }
  if (out.years.empty()) throw ContractError("series '" + series.word + "' has no counts");
  return out;
}

std::vector<PosTimeSeries> FrequencyFilter(const std::vector<PosTimeSeries> &series,
                                           long long theta_f, FrequencyMode mode) {
  if (theta_f < 0) throw ContractError("theta_f must be >= 0");
  std::vector<PosTimeSeries> out;
  for (const auto &s : series) {
    bool keep;
    if (mode == FrequencyMode::kTotal) {
      long long nouns = std::accumulate(s.noun_counts.begin(), s.noun_counts.end(), 0LL);
      long long verbs = std::accumulate(s.verb_counts.begin(), s.verb_counts.end(), 0LL);
      keep = nouns > theta_f && verbs > theta_f;
    } else {
      keep = !s.years.empty();
      for (std::size_t i = 0; i < s.years.size() && keep; ++i) {
        keep = s.noun_counts[i] + s.verb_counts[i] > theta_f;
      }
    }
    if (keep) out.push_back(s);
  }
  return out;
}

std::vector<double> NormalizeZscore(std::span<const double> q) {
  if (q.empty()) return {};
  double mean = std::accumulate(q.begin(), q.end(), 0.0) / static_cast<double>(q.size());
  double var = 0.0;
  for (double x : q) var += (x - mean) * (x - mean);
  var /= static_cast<double>(q.size());
  std::vector<double> out(q.size(), 0.0);
  double sd = std::sqrt(var);
  // Rounding can leave a tiny spread in a constant series.
  if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) return out;
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = (q[i] - mean) / sd;
  return out;
}

MeanShift MeanShiftScan(std::span<const double> z, std::size_t min_segment) {
  if (min_segment < 1) throw ContractError("min_segment must be >= 1");
  if (z.size() < 2 * min_segment) {
    throw ContractError("series of length " + std::to_string(z.size()) +
                        " is shorter than 2 * min_segment");
  }
  const std::size_t n = z.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + z[i];
  MeanShift best{min_segment, -1.0};
  for (std::size_t t = min_segment; t + min_segment <= n; ++t) {
    double left = prefix[t] / static_cast<double>(t);
    double right = (prefix[n] - prefix[t]) / static_cast<double>(n - t);
    double stat = std::abs(left - right);
    if (stat > best.statistic) best = {t, stat};
  }
  return best;
}

ChangePointTest TestChangePoint(std::span<const double> z, const ChangePointConfig &config) {
  if (config.permutations < 1) throw ContractError("need at least one permutation");
  ChangePointTest out;
  out.shift = MeanShiftScan(z, config.min_segment);
  Rng rng(config.seed);
  std::vector<double> perm(z.begin(), z.end());
  int exceed = 0;
  const double tolerance = 1e-12 * std::max(1.0, out.shift.statistic);
  for (int i = 0; i < config.permutations; ++i) {
    rng.Shuffle(perm);
    if (MeanShiftScan(perm, config.min_segment).statistic >= out.shift.statistic - tolerance) {
      ++exceed;
    }
  }
  out.p_value = static_cast<double>(exceed) / config.permutations;
  return out;
}

std::optional<ChangePoint> DetectChangePoint(const PosTimeSeries &series,
                                             const ChangePointConfig &config) {
  auto ratio = NounRatio(series);
  auto z = NormalizeZscore(ratio.ratio);
  auto test = TestChangePoint(z, config);
  if (!(test.p_value < config.alpha)) return std::nullopt;
  return ChangePoint{series.word, ratio.years[test.shift.index], test.shift.index,
                     test.p_value, test.shift.statistic};
}

std::string ChangePointsToCsv(const std::vector<ChangePoint> &points) {
  std::ostringstream out;
  out.precision(10);
  out << "word,year,index,p_value,statistic\n";
  for (const auto &p : points) {
    out << p.word << ',' << p.year << ',' << p.index << ',' << p.p_value << ',' << p.statistic << '\n';
  }
  return out.str();
}

std::string ZSeriesToCsv(const std::vector<PosTimeSeries> &series) {
  std::ostringstream out;
  out.precision(10);
  out << "word,year,ratio,z\n";
  for (const auto &s : series) {
    auto ratio = NounRatio(s);
    auto z = NormalizeZscore(ratio.ratio);
    for (std::size_t i = 0; i < z.size(); ++i) {
      out << s.word << ',' << ratio.years[i] << ',' << ratio.ratio[i] << ',' << z[i] << '\n';
    }
  }
  return out.str();
}

SplitResult SplitByChangePoint(const Dataset &dataset,
                               const std::map<std::string, int> &change_decades) {
  std::set<std::string> words;
  for (const auto &ex : dataset.supervised) words.insert(ex.utterance.denominal);
  for (const auto &u : dataset.unsupervised) words.insert(u.denominal);
  SplitResult out;
  for (const auto &word : words) {
    auto cp = change_decades.find(word);
    if (cp == change_decades.end()) {
      out.warnings.push_back("'" + word + "' has no change point; skipped");
      continue;
    }
    WordPartition part;
    part.word = word;
    part.change_decade = cp->second;
    auto missing = [&](const Utterance &u) {
      return ContractError("record '" + ToString(u) + "' has no decade stamp");
    };
    for (const auto &ex : dataset.supervised) {
      if (ex.utterance.denominal != word) continue;
      if (!ex.decade) throw missing(ex.utterance);
      if (*ex.decade < part.change_decade) {
        part.pre_records.push_back(ex);
        for (const auto &g : ex.gold) part.pre_interpretations.push_back(g.interpretation);
      } else {
        part.post_usages.push_back({ex.utterance, ex.decade});
      }
    }
    for (std::size_t i = 0; i < dataset.unsupervised.size(); ++i) {
      const auto &u = dataset.unsupervised[i];
      if (u.denominal != word) continue;
      std::optional<int> decade =
          i < dataset.unsupervised_decades.size() ? dataset.unsupervised_decades[i] : std::nullopt;
      if (!decade) throw missing(u);
      if (*decade >= part.change_decade) part.post_usages.push_back({u, decade});
    }
    std::sort(part.pre_interpretations.begin(), part.pre_interpretations.end());
    part.pre_interpretations.erase(
        std::unique(part.pre_interpretations.begin(), part.pre_interpretations.end()),
        part.pre_interpretations.end());
    if (part.post_usages.empty()) {
      out.warnings.push_back("'" + word + "' has no post-change usage; excluded");
      continue;
    }
    out.partitions.push_back(std::move(part));
  }
  return out;
}

}  // namespace noun2verb
