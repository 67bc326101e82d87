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

// The discriminative, partial generative and full generative models.
//
// Every model has a listener p_l(V, R[, E] | D, C) and a speaker
// p_s(D, C | V, R[, E]). Both are two-hidden-layer tanh networks over fixed
// word embeddings; each output component is an independent softmax head.
// Generative models add categorical priors over V, R and (full model) E.
//
// Latent cells are indexed as (v * |R| + r) * K + e, with K = 1 for models
// without frames.

#ifndef NOUN2VERB_MODELS_H_
#define NOUN2VERB_MODELS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noun2verb/checkpoint.h"
#include "noun2verb/data.h"
#include "noun2verb/lexicon.h"
#include "noun2verb/parameters.h"
#include "noun2verb/random.h"
#include "noun2verb/tensor.h"

namespace noun2verb {

enum class ModelKind { kDiscriminative, kPartial, kFull };

std::string_view ModelKindName(ModelKind kind);
std::optional<ModelKind> ParseModelKind(std::string_view name);

struct HeadSpec {
  std::vector<std::string> denominals;
  std::vector<std::string> contexts;
  std::vector<std::string> verbs;
  std::vector<Relation> relations{kAllRelations.begin(), kAllRelations.end()};
  std::size_t frames = 16;

  void Validate() const;

  // Candidate lists drawn from a dataset: D and C over supervised and
  // unsupervised utterances, V over gold verbs of the supervised set.
  static HeadSpec FromDataset(const Dataset &dataset, std::size_t frames = 16);
};

struct ModelConfig {
  std::size_t hidden = 128;
  std::size_t frame_dimension = 0;  // 0 means the embedding dimension.
  std::uint64_t seed = 0;
  std::size_t enumeration_limit = 10000;
};

struct LatentPosterior {
  std::vector<double> verb;
  std::vector<double> relation;
  std::vector<double> frame;  // Empty unless the model has frames.

  double Joint(std::size_t v, std::size_t r, std::size_t e = 0) const;
};

struct SpeakerDistribution {
  std::vector<double> denominal;
  std::vector<double> context;
};

struct PriorDistributions {
  std::vector<double> verb;
  std::vector<double> relation;
  std::vector<double> frame;
};

struct Cell {
  std::size_t verb = 0;
  std::size_t relation = 0;
  std::size_t frame = 0;
};

class Model {
 public:
  Model(ModelKind kind, HeadSpec heads, EmbeddingTable embeddings,
        ModelConfig config);

  ModelKind kind() const { return kind_; }
  bool generative() const { return kind_ != ModelKind::kDiscriminative; }
  bool has_frames() const { return kind_ == ModelKind::kFull; }
  const HeadSpec &heads() const { return heads_; }
  const ModelConfig &config() const { return config_; }
  const EmbeddingTable &embeddings() const { return embeddings_; }
  ParameterSet &parameters() { return params_; }
  const ParameterSet &parameters() const { return params_; }

  // Frame cardinality as seen by the cell index: K for the full model.
  std::size_t frame_count() const { return has_frames() ? heads_.frames : 1; }
  std::size_t cell_count() const;
  Cell DecodeCell(std::size_t cell) const;
  std::size_t EncodeCell(const Cell &cell) const;

  std::optional<std::size_t> VerbIndex(std::string_view verb) const;
  std::optional<std::size_t> RelationIndex(Relation relation) const;
  std::optional<std::size_t> DenominalIndex(std::string_view token) const;
  std::optional<std::size_t> ContextIndex(std::string_view token) const;

  PriorDistributions Priors() const;
  void SetPriors(const PriorDistributions &priors);

  // Parameter names owned by each network. The sets are disjoint.
  std::vector<std::string> ListenerParameterNames() const;
  std::vector<std::string> SpeakerParameterNames() const;

  struct ListenerLogits {
    Tensor verb;      // n x |V| log-probabilities.
    Tensor relation;  // n x |R|
    Tensor frame;     // n x K, undefined without frames.
  };
  ListenerLogits ListenerLogProbs(std::span<const Utterance> utterances) const;

  struct SpeakerLogits {
    Tensor denominal;  // n x |D| log-probabilities.
    Tensor context;    // n x |C|
  };
  // One row per cell; cells are (verb, relation, frame) index triples.
  SpeakerLogits SpeakerLogProbs(std::span<const Cell> cells) const;
  // All cells in index order.
  SpeakerLogits SpeakerLogProbsAllCells() const;

  LatentPosterior ListenerPosterior(const Utterance &utterance) const;
  SpeakerDistribution SpeakerLikelihood(
      const Interpretation &interpretation,
      std::optional<std::size_t> frame = std::nullopt) const;

  Checkpoint ToCheckpoint() const;
  static Model FromCheckpoint(const Checkpoint &checkpoint);

 private:
  void Build();

  ModelKind kind_;
  HeadSpec heads_;
  EmbeddingTable embeddings_;
  ModelConfig config_;
  ParameterSet params_;
  PriorDistributions priors_;
  Tensor verb_inputs_;      // |V| x d
  Tensor relation_inputs_;  // |R| x (d + 8)
  std::map<std::string, std::size_t, std::less<>> verb_index_, denominal_index_,
      context_index_;
};

// Sets every parameter to zero, which makes every head uniform.
void ZeroParameters(Model &model);

// Joint over cells, indexed like Model::DecodeCell.
std::vector<double> ListenerJoint(const Model &model, const Utterance &utterance);
// Exact posterior p_s(cell | U) proportional to p_0(cell) p_s(U | cell).
std::vector<double> SpeakerPosterior(const Model &model, const Utterance &utterance);
// log sum_cell p_0(cell) p_s(U | cell), by enumeration.
double LogMarginal(const Model &model, const Utterance &utterance);
// ELBO under an arbitrary joint q over cells (zero entries contribute 0).
double ElboForPosterior(const Model &model, const Utterance &utterance,
                        std::span<const double> q);

enum class ElboEstimator { kExact, kScoreFunction };

// Per-utterance exponential moving average of the sampled objective.
struct ScoreBaseline {
  double decay = 0.9;
  std::map<Utterance, double> values;
};

struct ElboOptions {
  ElboEstimator estimator = ElboEstimator::kExact;
  std::size_t samples = 100;
  Rng *rng = nullptr;                // Required for the score estimator.
  ScoreBaseline *baseline = nullptr;  // Optional.
};

struct ElboResult {
  // Sum of per-utterance ELBOs. In score-function mode the value is the
  // Monte Carlo estimate and the gradient is the baselined estimator.
  Tensor total;
  std::vector<double> values;
  std::vector<double> standard_errors;  // Zero in exact mode.
};

ElboResult Elbo(const Model &model, std::span<const Utterance> utterances,
                const ElboOptions &options = {});

struct SupervisedOptions {
  // Cross-entropy against the empirical vote distribution instead of the
  // top-ranked gold verb.
  bool soft_targets = false;
};

// S = S_l + S_s summed over the batch. The target verb is the top-ranked gold
// verb present in the V head. For the full model the speaker term
// marginalizes the frame under its prior.
Tensor SupervisedLoss(const Model &model,
                      std::span<const SupervisedExample> batch,
                      const SupervisedOptions &options = {});

// L = -sum ELBO + lambda * S. Generative models only.
Tensor SemiSupervisedLoss(const Model &model,
                          std::span<const SupervisedExample> supervised,
                          std::span<const Utterance> unsupervised,
                          double lambda, const ElboOptions &elbo = {},
                          const SupervisedOptions &options = {});

}  // namespace noun2verb

#endif  // NOUN2VERB_MODELS_H_
