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

#include "noun2verb/synthetic.h"


#include "noun2verb/errors.h"

namespace noun2verb {
namespace {

std::string Name(const std::string &prefix, std::size_t i) { return prefix + std::to_string(i); }

std::vector<double> Gaussian(std::size_t d, Rng &rng, double scale = 1.0) {
  std::vector<double> v(d);
  for (double &x : v) x = scale * rng.Normal();
  return v;
}

}  // namespace

Benchmark MakeRelationBenchmark(const RelationBenchmarkConfig &c) {
  Rng rng(c.seed);
  const std::size_t nr = kNumRelations;
  std::vector<std::string> tokens;
  std::vector<double> rows;
  auto add = [&](const std::string &t, const std::vector<double> &v) {
    tokens.push_back(t);
    rows.insert(rows.end(), v.begin(), v.end());
  };
  Benchmark b;
  std::vector<std::size_t> context_relation;
  for (std::size_t r = 0; r < nr; ++r) {
    auto centroid = Gaussian(c.dimension, rng);
    for (std::size_t j = 0; j < c.contexts_per_relation; ++j) {
      auto v = Gaussian(c.dimension, rng, c.cluster_noise);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += centroid[i];
      std::string name = Name("ctx", r * c.contexts_per_relation + j);
      add(name, v);
      b.heads.contexts.push_back(name);
      context_relation.push_back(r);
    }
  }
  for (std::size_t j = 0; j < c.verbs; ++j) {
    std::string name = Name("verb", j);
    add(name, Gaussian(c.dimension, rng));
    b.heads.verbs.push_back(name);
  }
  for (std::size_t i = 0; i < c.denominals; ++i) {
    std::string name = Name("noun", i);
    add(name, Gaussian(c.dimension, rng));
    b.heads.denominals.push_back(name);
  }
  b.heads.frames = 2;
  b.embeddings = EmbeddingTable(c.dimension, tokens, rows);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t d = 0; d < c.denominals; ++d) {
    for (std::size_t x = 0; x < b.heads.contexts.size(); ++x) pairs.emplace_back(d, x);
  }
  if (c.supervised + c.unsupervised + c.test > pairs.size()) {
    throw ContractError("relation benchmark asks for more pairs than exist");
  }
  rng.Shuffle(pairs);
  std::size_t at = 0;
  auto example = [&](std::size_t d, std::size_t x) {
    std::size_t r = context_relation[x];
    std::size_t v = rng.UniformInt(c.verbs);
    SupervisedExample ex;
    ex.utterance = {b.heads.denominals[d], b.heads.contexts[x]};
    ex.gold.push_back({{b.heads.verbs[v], kAllRelations[r]}, 3});
    return ex;
  };
  for (std::size_t i = 0; i < c.supervised; ++i, ++at) {
    b.train.supervised.push_back(example(pairs[at].first, pairs[at].second));
  }
  for (std::size_t i = 0; i < c.unsupervised; ++i, ++at) {
    b.train.AddUnsupervised({b.heads.denominals[pairs[at].first], b.heads.contexts[pairs[at].second]});
  }
  for (std::size_t i = 0; i < c.test; ++i, ++at) {
    b.test.supervised.push_back(example(pairs[at].first, pairs[at].second));
  }
  return b;
}

Benchmark MakeFrameBenchmark(const FrameBenchmarkConfig &c) {
  if (c.blocks == 0 || c.blocks > kNumRelations || c.group_size == 0) {
    throw ContractError("frame benchmark needs 1 to 8 blocks and non-empty groups");
  }
  if (c.supervised_fraction + c.test_fraction > 1.0) {
    throw ContractError("frame benchmark fractions exceed 1");
  }
  Rng rng(c.seed);
  Benchmark b;
  std::vector<std::string> tokens;
  std::vector<double> rows;
  auto add = [&](std::vector<std::string> &list, const std::string &t) {
    list.push_back(t);
    tokens.push_back(t);
    auto v = Gaussian(c.dimension, rng);
    rows.insert(rows.end(), v.begin(), v.end());
  };
  auto token = [](char kind, std::size_t r, std::size_t g, std::size_t i) {
    return std::string(1, kind) + std::to_string(r) + "_" + std::to_string(g) + "_" +
           std::to_string(i);
  };
  for (std::size_t r = 0; r < c.blocks; ++r) {
    for (std::size_t g = 0; g < 2; ++g) {
      for (std::size_t i = 0; i < c.group_size; ++i) {
        add(b.heads.denominals, token('n', r, g, i));
        add(b.heads.contexts, token('c', r, g, i));
      }
    }
    for (std::size_t v = 0; v < 2; ++v) add(b.heads.verbs, Name("v" + std::to_string(r) + "_", v));
  }
  b.heads.relations.assign(kAllRelations.begin(), kAllRelations.begin() + c.blocks);
  b.heads.frames = 2;
  b.embeddings = EmbeddingTable(c.dimension, tokens, rows);

  struct Pair {
    Utterance utterance;
    std::size_t block;
    double first;  // p(verb 0).
  };
  std::vector<Pair> pairs;
  const std::size_t n = c.group_size;
  for (std::size_t r = 0; r < c.blocks; ++r) {
    for (std::size_t gd = 0; gd < 2; ++gd) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t gc = 0; gc < 2; ++gc) {
          for (std::size_t j = 0; j < n; ++j) {
            pairs.push_back({{token('n', r, gd, i), token('c', r, gc, j)}, r,
                             gd == gc ? c.preference : 1.0 - c.preference});
          }
        }
      }
    }
  }
  rng.Shuffle(pairs);
  const auto ns = static_cast<std::size_t>(c.supervised_fraction * pairs.size());
  const auto nt = static_cast<std::size_t>(c.test_fraction * pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Pair &p = pairs[i];
    if (i >= ns + nt) {
      b.train.AddUnsupervised(p.utterance);
      continue;
    }
    int first = rng.Binomial(c.votes, p.first);
    SupervisedExample ex;
    ex.utterance = p.utterance;
    const Relation rel = kAllRelations[p.block];
    const std::string stem = "v" + std::to_string(p.block) + "_";
    if (first > 0) ex.gold.push_back({{Name(stem, 0), rel}, first});
    if (first < c.votes) ex.gold.push_back({{Name(stem, 1), rel}, c.votes - first});
    (i < nt ? b.test : b.train).supervised.push_back(std::move(ex));
  }
  return b;
}

std::vector<Utterance> SampleUtterances(const Model &model, std::size_t n, Rng &rng) {
  auto priors = model.Priors();
  std::vector<Utterance> out;
  for (std::size_t i = 0; i < n; ++i) {
    Cell c{rng.Categorical(priors.verb), rng.Categorical(priors.relation),
           model.has_frames() ? rng.Categorical(priors.frame) : 0};
    Interpretation in{model.heads().verbs[c.verb], model.heads().relations[c.relation]};
    auto sp = model.has_frames() ? model.SpeakerLikelihood(in, c.frame)
                                 : model.SpeakerLikelihood(in);
    out.push_back({model.heads().denominals[rng.Categorical(sp.denominal)],
                   model.heads().contexts[rng.Categorical(sp.context)]});
  }
  return out;
}

PosTimeSeries StepSeries(std::size_t years, std::size_t change_index, double before,
                         double after, int per_year, Rng &rng, int first_year) {
  PosTimeSeries s;
  s.word = "synthetic";
  for (std::size_t i = 0; i < years; ++i) {
    int nouns = rng.Binomial(per_year, i < change_index ? before : after);
    s.years.push_back(first_year + static_cast<int>(i));
    s.noun_counts.push_back(nouns);
    s.verb_counts.push_back(per_year - nouns);
  }
  return s;
}

}  // namespace noun2verb
