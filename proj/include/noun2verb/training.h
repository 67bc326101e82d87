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

// Optimization loops, semi-supervised batching and cross-validation.

#ifndef NOUN2VERB_TRAINING_H_
#define NOUN2VERB_TRAINING_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "noun2verb/data.h"
#include "noun2verb/models.h"
#include "noun2verb/optimizer.h"

namespace noun2verb {

enum class EstimatorChoice { kAuto, kExact, kScoreFunction };

struct TrainConfig {
  int epochs = 100;
  std::size_t supervised_batch = 16;
  std::size_t unsupervised_batch = 16;
  double lambda = 1.0;
  OptimizerConfig optimizer;
  EstimatorChoice estimator = EstimatorChoice::kAuto;
  std::size_t samples = 100;  // Score-function samples per utterance.
  std::uint64_t seed = 0;
  std::size_t enumeration_limit = 10000;
  bool soft_targets = false;
  int checkpoint_every = 0;  // Epochs; 0 writes only the final checkpoint.
  std::string checkpoint_dir;  // Empty disables checkpoints.
  std::string log_path;        // Line-delimited JSON, one record per epoch.
  // Model shape, used when the trainer builds the model.
  std::size_t hidden = 128;
  std::size_t frames = 16;
  std::size_t frame_dimension = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
};

// Flat "key = value" lines; '#' starts a comment. The seed key is required.
TrainConfig ParseTrainConfig(const std::string &text);
TrainConfig LoadTrainConfig(const std::string &path);

struct EpochRecord {
  int epoch = 0;
  double supervised = 0.0;    // S, mean per step.
  double unsupervised = 0.0;  // U as negative ELBO, mean per step.
  double total = 0.0;         // L, mean per step.
  double grad_norm = 0.0;     // Mean over steps.
  double seconds = 0.0;       // Cumulative wall time.
};

struct TrainingReport {
  std::vector<EpochRecord> epochs;
  std::string final_checkpoint;
};

// Called after every epoch with the 1-based epoch number.
using EpochCallback = std::function<void(int epoch, const Model &model)>;

// Each step draws one supervised and one unsupervised batch (cycling the
// shorter set) and takes one optimizer step on L = -sum ELBO + lambda S. The
// discriminative model sees S only, so unsupervised data never affects it.
TrainingReport Train(Model &model, const Dataset &dataset,
                     const TrainConfig &config,
                     const EpochCallback &on_epoch = nullptr);

ModelConfig ModelConfigFor(const TrainConfig &config);

// Removes every training record whose denominal verb also heads a test-fold
// utterance, so no target D is seen in training.
void ExcludeTestDenominals(Fold &fold);

using MetricBundle = std::map<std::string, double>;

struct FoldResult {
  int fold = 0;
  TrainingReport report;
  MetricBundle metrics;
};

using ModelFactory = std::function<Model(const Fold &fold)>;
using FoldEvaluator = std::function<MetricBundle(const Model &model, const Fold &fold)>;

// Fresh model per fold, trained on the fold's training side after leakage
// control. Failures are rethrown with the fold index.
std::vector<FoldResult> CrossValidate(const ModelFactory &factory,
                                      const Dataset &dataset, int k,
                                      const TrainConfig &config,
                                      const FoldEvaluator &evaluate);

// Per-metric mean over folds.
MetricBundle MeanMetrics(const std::vector<FoldResult> &results);

}  // namespace noun2verb

#endif  // NOUN2VERB_TRAINING_H_
