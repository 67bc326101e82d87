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

// Small models and embedding tables shared by the test binaries.

#ifndef NOUN2VERB_TESTS_FIXTURES_H_
#define NOUN2VERB_TESTS_FIXTURES_H_

#include <set>
#include <string>
#include <vector>

#include "noun2verb/lexicon.h"
#include "noun2verb/models.h"
#include "noun2verb/random.h"

namespace noun2verb::testing {

inline std::vector<std::string> Tokens(const std::string &prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Gaussian vectors for every token in the lists.
inline EmbeddingTable RandomEmbeddings(const std::vector<std::vector<std::string>> &lists,
                                       std::size_t dimension, std::uint64_t seed) {
  std::set<std::string> all;
  for (const auto &l : lists) all.insert(l.begin(), l.end());
  Rng rng(seed);
  std::vector<std::string> tokens(all.begin(), all.end());
  std::vector<double> rows(tokens.size() * dimension);
  for (double &x : rows) x = rng.Normal();
  return EmbeddingTable(dimension, tokens, rows);
}

// |D| = |C| = dc, |V| = nv, the first nr relations, K frames.
inline HeadSpec ToyHeads(std::size_t dc, std::size_t nv, std::size_t nr,
                         std::size_t k) {
  HeadSpec h;
  h.denominals = Tokens("d", dc);
  h.contexts = Tokens("c", dc);
  h.verbs = Tokens("v", nv);
  h.relations.assign(kAllRelations.begin(), kAllRelations.begin() + nr);
  h.frames = k;
  return h;
}

inline Model ToyModel(ModelKind kind, const HeadSpec &heads, std::uint64_t seed,
                      std::size_t dimension = 4, std::size_t hidden = 8) {
  ModelConfig config;
  config.hidden = hidden;
  config.seed = seed;
  auto table = RandomEmbeddings({heads.denominals, heads.contexts, heads.verbs},
                                dimension, seed ^ 0x9e3779b97f4a7c15ULL);
  return Model(kind, heads, table, config);
}

// Redraws every parameter from N(0, scale^2).
inline void RandomizeParameters(Model &model, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  for (auto &[name, t] : model.parameters()) {
    for (double &x : t.mutable_values()) x = scale * rng.Normal();
  }
}

}  // namespace noun2verb::testing

#endif  // NOUN2VERB_TESTS_FIXTURES_H_
