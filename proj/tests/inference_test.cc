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

#include "noun2verb/inference.h"

#include <cmath>

#include "doctest.h"
#include "fixtures.h"
#include "noun2verb/errors.h"

namespace noun2verb {
namespace {

using testing::RandomizeParameters;
using testing::ToyHeads;
using testing::ToyModel;

TEST_CASE("single-frame marginal is the head product") {
  auto m = ToyModel(ModelKind::kFull, ToyHeads(4, 3, 2, 1), 1);
  RandomizeParameters(m, 2);
  Utterance u{"d1", "c3"};
  auto post = m.ListenerPosterior(u);
  auto ranked = RankInterpretations(m, u);
  CHECK(ranked.size() == 6);
  for (const auto &s : ranked) {
    double p = post.verb[*m.VerbIndex(s.item.verb)] * post.relation[*m.RelationIndex(s.item.relation)];
    CHECK(s.score == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("exact frame marginal matches brute force") {
  auto m = ToyModel(ModelKind::kFull, ToyHeads(4, 3, 2, 3), 3);
  RandomizeParameters(m, 4);
  m.SetPriors({{1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.5, 0.5}, {0.2, 0.5, 0.3}});
  Utterance u{"d0", "c2"};
  auto post = m.ListenerPosterior(u);
  auto beta = m.Priors().frame;
  FrameSampleConfig exact;
  exact.mode = FrameSampleConfig::Mode::kExact;
  auto ranked = RankInterpretations(m, u, exact);
  double z = 0.0;
  for (std::size_t v = 0; v < 3; ++v) {
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t e = 0; e < 3; ++e) z += beta[e] * post.Joint(v, r, e);
    }
  }
  for (const auto &s : ranked) {
    std::size_t v = *m.VerbIndex(s.item.verb), r = *m.RelationIndex(s.item.relation);
    double brute = 0.0;
    for (std::size_t e = 0; e < 3; ++e) brute += beta[e] * post.Joint(v, r, e);
    CHECK(std::abs(s.score - brute / z) < 1e-12);
    CHECK(std::abs(s.score - post.verb[v] * post.relation[r]) < 1e-12);
  }
  for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].score >= ranked[i].score);
}

TEST_CASE("sampled and exact frames agree on top-1") {
  for (int trial = 0; trial < 10; ++trial) {
    auto m = ToyModel(ModelKind::kFull, ToyHeads(4, 3, 2, 2), 10 + trial);
    RandomizeParameters(m, 20 + trial);
    FrameSampleConfig exact, sampled;
    exact.mode = FrameSampleConfig::Mode::kExact;
    sampled.mode = FrameSampleConfig::Mode::kSampled;
    sampled.samples = 5000;
    sampled.seed = trial;
    Utterance u{"d2", "c1"};
    CHECK(Comprehend(m, u, 1, exact)[0].item == Comprehend(m, u, 1, sampled)[0].item);
    Interpretation in{"v1", Relation::kLocatumOut};
    auto pe = Produce(m, in, 1, exact);
    auto ps = Produce(m, in, 1, sampled);
    CHECK(pe[0].item == ps[0].item);
  }
}

TEST_CASE("production on a zero-weight model") {
  auto m = ToyModel(ModelKind::kPartial, ToyHeads(2, 2, 2, 1), 5);
  ZeroParameters(m);
  auto ranked = Produce(m, {"v0", Relation::kLocatumOn}, 10);
  REQUIRE(ranked.size() == 4);
  CHECK(ranked[0].item == Utterance{"d0", "c0"});
  CHECK(ranked[1].item == Utterance{"d0", "c1"});
  CHECK(ranked[3].item == Utterance{"d1", "c1"});
  for (const auto &s : ranked) CHECK(s.score == doctest::Approx(0.25).epsilon(1e-12));
  std::vector<Utterance> none;
  CHECK_THROWS_AS(Produce(m, {"v0", Relation::kLocatumOn}, 3, {}, &none), ContractError);
  CHECK_THROWS_AS(Produce(m, {"v0", Relation::kLocatumOn}, 0), ContractError);
  std::vector<Utterance> pool = {{"zz", "c0"}, {"d1", "c0"}};
  auto restricted = Produce(m, {"v0", Relation::kLocatumOn}, 5, {}, &pool);
  REQUIRE(restricted.size() == 2);
  CHECK(restricted[0].item == Utterance{"d1", "c0"});
  CHECK(restricted[1].score == 0.0);
}

TEST_CASE("production marginalizes frames") {
  auto m = ToyModel(ModelKind::kFull, ToyHeads(3, 2, 2, 2), 6);
  RandomizeParameters(m, 7);
  m.SetPriors({{0.5, 0.5}, {0.5, 0.5}, {0.3, 0.7}});
  Interpretation in{"v1", Relation::kLocatumOn};
  auto s0 = m.SpeakerLikelihood(in, 0), s1 = m.SpeakerLikelihood(in, 1);
  for (const auto &s : RankUtterances(m, in)) {
    std::size_t d = *m.DenominalIndex(s.item.denominal), c = *m.ContextIndex(s.item.context);
    double p = 0.3 * s0.denominal[d] * s0.context[c] + 0.7 * s1.denominal[d] * s1.context[c];
    CHECK(s.score == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("rankings are invariant under positive rescaling") {
  auto m = ToyModel(ModelKind::kFull, ToyHeads(3, 3, 2, 2), 8);
  RandomizeParameters(m, 9);
  auto ranked = RankUtterances(m, {"v2", Relation::kLocatumOut});
  auto scaled = ranked;
  for (auto &s : scaled) s.score *= 7.5;
  std::reverse(scaled.begin(), scaled.end());
  SortRanked(scaled);
  for (std::size_t i = 0; i < ranked.size(); ++i) CHECK(scaled[i].item == ranked[i].item);
}

TEST_CASE("future usage prediction") {
  auto m = ToyModel(ModelKind::kPartial, ToyHeads(2, 2, 2, 1), 10);
  RandomizeParameters(m, 11);
  std::vector<Interpretation> ins = {{"v0", Relation::kLocatumOn}, {"v1", Relation::kLocatumOut}};
  auto all = PredictFutureUsage(m, ins, 100);
  CHECK(all.size() == 4);
  auto a = RankUtterances(m, ins[0]), b = RankUtterances(m, ins[1]);
  for (const auto &s : all) {
    double best = 0.0;
    for (const auto *list : {&a, &b}) {
      for (const auto &t : *list) {
        if (t.item == s.item) best = std::max(best, t.score);
      }
    }
    CHECK(s.score == best);
  }
  CHECK(PredictFutureUsage(m, ins, 2).size() == 2);
  CHECK_THROWS_AS(PredictFutureUsage(m, ins, 0), ContractError);
}

TEST_CASE("frame posterior export") {
  auto m = ToyModel(ModelKind::kFull, ToyHeads(3, 2, 2, 4), 12);
  RandomizeParameters(m, 13);
  std::vector<Utterance> us = {{"d0", "c1"}, {"d2", "c2"}, {"d0", "c1"}};
  auto table = ExportFramePosteriors(m, us);
  REQUIRE(table.rows.size() == 3);
  for (const auto &row : table.rows) {
    CHECK(row.size() == 4);
    double s = 0.0;
    for (double p : row) s += p;
    CHECK(std::abs(s - 1.0) < 1e-9);
  }
  CHECK(table.rows[0] == table.rows[2]);
  auto csv = table.ToCsv();
  CHECK(csv.rfind("denominal,context,frame_0,frame_1,frame_2,frame_3\nd0,c1,", 0) == 0);
  auto partial = ToyModel(ModelKind::kPartial, ToyHeads(3, 2, 2, 4), 12);
  CHECK_THROWS_AS(ExportFramePosteriors(partial, us), ContractError);
}

}  // namespace
}  // namespace noun2verb
