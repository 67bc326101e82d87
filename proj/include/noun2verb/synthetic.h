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

// Seeded synthetic corpora with known ground truth, used by the acceptance
// suite and the unit tests.

#ifndef NOUN2VERB_SYNTHETIC_H_
#define NOUN2VERB_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "noun2verb/data.h"
#include "noun2verb/diachronic.h"
#include "noun2verb/lexicon.h"
#include "noun2verb/models.h"
#include "noun2verb/random.h"

namespace noun2verb {

struct Benchmark {
  Dataset train;  // Supervised and unsupervised records.
  Dataset test;   // Supervised records with annotation votes.
  EmbeddingTable embeddings;
  HeadSpec heads;  // D and C over every token, V over every verb.
};

// Relation is a deterministic function of the context token. Context
// embeddings cluster by relation. Verbs are shared by every relation, so the
// verb alone never reveals the relation.
struct RelationBenchmarkConfig {
  std::size_t contexts_per_relation = 6;
  std::size_t denominals = 24;
  std::size_t verbs = 4;
  std::size_t supervised = 160;
  std::size_t unsupervised = 160;
  std::size_t test = 80;
  double cluster_noise = 0.3;
  std::size_t dimension = 16;
  std::uint64_t seed = 0;
};

Benchmark MakeRelationBenchmark(const RelationBenchmarkConfig &config);

// Each block is one relation with two verbs, two groups of denominals and
// two groups of contexts. Verb 0 prefers the matched group pairs and verb 1
// the crossed ones, so every verb has two latent frames and neither D nor C
// alone says anything about V. Unsupervised records cover the remaining
// pairs of the grid.
struct FrameBenchmarkConfig {
  std::size_t blocks = 1;
  std::size_t group_size = 12;  // Tokens per denominal or context group.
  double preference = 0.9;      // p(verb 0) on matched group pairs.
  double supervised_fraction = 0.1;
  double test_fraction = 0.1;
  int votes = 20;
  std::size_t dimension = 16;
  std::uint64_t seed = 0;
};

Benchmark MakeFrameBenchmark(const FrameBenchmarkConfig &config);

// Utterances drawn from a generative model's prior and speaker.
std::vector<Utterance> SampleUtterances(const Model &model, std::size_t n, Rng &rng);

// Binomial noun counts with ratio before / after a step at change_index.
PosTimeSeries StepSeries(std::size_t years, std::size_t change_index, double before,
                         double after, int per_year, Rng &rng, int first_year = 1900);

}  // namespace noun2verb

#endif  // NOUN2VERB_SYNTHETIC_H_
