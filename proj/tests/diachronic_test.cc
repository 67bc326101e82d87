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

#include <cmath>

#include "doctest.h"
#include "noun2verb/errors.h"
#include "noun2verb/random.h"

namespace noun2verb {
namespace {

PosTimeSeries Step(double before, double after, std::size_t change, std::size_t years,
                   int n, Rng &rng) {
  PosTimeSeries s;
  s.word = "w";
  for (std::size_t i = 0; i < years; ++i) {
    int nouns = rng.Binomial(n, i < change ? before : after);
    s.years.push_back(1900 + static_cast<int>(i));
    s.noun_counts.push_back(nouns);
    s.verb_counts.push_back(n - nouns);
  }
  return s;
}

// Direct O(n^2) evaluation of the statistic at every pivot.
MeanShift BruteForceScan(const std::vector<double> &z, std::size_t min_segment) {
  MeanShift best{0, -1.0};
  for (std::size_t t = min_segment; t + min_segment <= z.size(); ++t) {
    double a = 0, b = 0;
    for (std::size_t i = 0; i < t; ++i) a += z[i];
    for (std::size_t i = t; i < z.size(); ++i) b += z[i];
    double stat = std::abs(a / t - b / (z.size() - t));
    if (stat > best.statistic + 1e-12) best = {t, stat};
  }
  return best;
}

TEST_CASE("noun ratio") {
  PosTimeSeries s{"w", {1, 2, 3, 4}, {30, 5, 7, 0}, {10, 0, 7, 0}};
  auto r = NounRatio(s);
  CHECK(r.ratio == std::vector<double>{0.75, 1.0, 0.5});
  CHECK(r.dropped_years == std::vector<int>{4});
  PosTimeSeries empty{"z", {1, 2}, {0, 0}, {0, 0}};
  CHECK_THROWS_AS(NounRatio(empty), ContractError);
  PosTimeSeries unsorted{"u", {2, 1}, {1, 1}, {1, 1}};
  CHECK_THROWS_AS(NounRatio(unsorted), ContractError);
}

TEST_CASE("frequency filter") {
  std::vector<PosTimeSeries> all = {{"a", {1, 2}, {10, 10}, {1, 2}},
                                    {"b", {1}, {100}, {0}},
                                    {"c", {1, 2}, {600, 600}, {300, 300}}};
  auto zero = FrequencyFilter(all, 0);
  CHECK(zero.size() == 2);
  auto five = FrequencyFilter(all, 5);
  REQUIRE(five.size() == 1);
  CHECK(five[0].word == "c");
  for (long long theta : {0LL, 2LL, 5LL, 500LL, 1000LL}) {
    auto lo = FrequencyFilter(all, theta), hi = FrequencyFilter(all, theta + 100);
    CHECK(hi.size() <= lo.size());
  }
  CHECK(FrequencyFilter(all, 11, FrequencyMode::kPerYear).size() == 2);
  CHECK(kDefaultFrequencyThreshold == 500);
}

TEST_CASE("z-scores") {
  std::vector<double> two = {0.0, 1.0};
  CHECK(NormalizeZscore(two) == std::vector<double>{-1.0, 1.0});
  std::vector<double> flat(7, 0.3);
  for (double z : NormalizeZscore(flat)) CHECK(z == 0.0);
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> q(3 + rng.UniformInt(40));
    for (double &x : q) x = rng.Uniform();
    auto z = NormalizeZscore(q);
    double mean = 0, var = 0;
    for (double x : z) mean += x;
    mean /= z.size();
    for (double x : z) var += (x - mean) * (x - mean);
    var /= z.size();
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(var - 1.0) < 1e-9);
  }
}

TEST_CASE("mean-shift scan matches brute force") {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> z(10 + rng.UniformInt(30));
    for (double &x : z) x = rng.Normal();
    auto fast = MeanShiftScan(z, 5), slow = BruteForceScan(z, 5);
    CHECK(fast.index == slow.index);
    CHECK(fast.statistic == doctest::Approx(slow.statistic).epsilon(1e-12));
  }
  std::vector<double> tie = {0, 0, 0, 0, 0, 0};
  CHECK(MeanShiftScan(tie, 2).index == 2);
  CHECK_THROWS_AS(MeanShiftScan(tie, 4), ContractError);
}

TEST_CASE("constant series has no change point") {
  PosTimeSeries s{"flat", {}, {}, {}};
  for (int y = 0; y < 30; ++y) {
    s.years.push_back(1900 + y);
    s.noun_counts.push_back(40);
    s.verb_counts.push_back(10);
  }
  ChangePointConfig c;
  c.permutations = 200;
  CHECK_FALSE(DetectChangePoint(s, c).has_value());
  auto z = NormalizeZscore(NounRatio(s).ratio);
  CHECK(TestChangePoint(z, c).p_value == 1.0);
}

TEST_CASE("step series change point") {
  Rng rng(3);
  auto s = Step(0.9, 0.4, 50, 100, 500, rng);
  ChangePointConfig c;
  c.seed = 4;
  auto cp = DetectChangePoint(s, c);
  REQUIRE(cp.has_value());
  CHECK(cp->index >= 48);
  CHECK(cp->index <= 52);
  CHECK(cp->p_value < 0.05);
  CHECK(cp->year == 1900 + static_cast<int>(cp->index));
  c.seed = 99;
  auto again = DetectChangePoint(s, c);
  REQUIRE(again.has_value());
  CHECK(again->index == cp->index);
  CHECK(again->statistic == cp->statistic);
}

TEST_CASE("counts file format") {
  auto series = ParseCounts("word,year,noun_count,verb_count\n"
                            "phone,1901,10,2\nphone,1900,12,0\ngarage,1950,5,5\n");
  REQUIRE(series.size() == 2);
  CHECK(series[0].word == "garage");
  CHECK(series[1].years == std::vector<int>{1900, 1901});
  CHECK(series[1].noun_counts == std::vector<long long>{12, 10});
  try {
    ParseCounts("phone,1900,1,1\nphone,1900,2,2\n");
    FAIL("expected FormatError");
  } catch (const FormatError &e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(ParseCounts("phone,1900,1\n"), FormatError);
  CHECK_THROWS_AS(ParseCounts("phone,19x0,1,1\n"), FormatError);
  auto csv = ZSeriesToCsv(series);
  CHECK(csv.rfind("word,year,ratio,z\ngarage,1950,0.5,0\n", 0) == 0);
}

TEST_CASE("split by change point") {
  auto ds = ParseDataset(
      "garage\tcar\tLOCATION_IN\tpark:2\tcorpus\t1870\n"
      "garage\ttruck\tLOCATION_IN\tstore:1\thistorical\t1900\n"
      "phone\tfriend\tINSTRUMENT\tcall:1\thistorical\t1880\n"
      "mail\tletter\tINSTRUMENT\tsend:1\thistorical\t1900\n"
      "garage\tbike\t1910\n");
  auto split = SplitByChangePoint(ds, {{"garage", 1880}, {"phone", 1950}});
  REQUIRE(split.partitions.size() == 1);
  const auto &g = split.partitions[0];
  CHECK(g.word == "garage");
  CHECK(g.pre_records.size() == 1);
  CHECK(g.pre_interpretations == std::vector<Interpretation>{{"park", Relation::kLocationIn}});
  CHECK(g.post_usages.size() == 2);
  CHECK(split.warnings.size() == 2);  // mail has no change point; phone has no post side.
  auto none = ParseDataset("garage\tcar\tLOCATION_IN\tpark:2\n");
  CHECK_THROWS_AS(SplitByChangePoint(none, {{"garage", 1880}}), ContractError);
  CHECK(DecadeOf(1987) == 1980);
}

}  // namespace
}  // namespace noun2verb
