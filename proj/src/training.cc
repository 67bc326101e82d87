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

#include "noun2verb/training.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "noun2verb/errors.h"

namespace noun2verb {
namespace {

std::string Trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(const std::string &key, const std::string &value, int line) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) {
    throw FormatError("bad value '" + value + "' for " + key, line);
  }
  return out;
}

bool ParseBool(const std::string &key, const std::string &value, int line) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw FormatError("bad boolean '" + value + "' for " + key, line);
}

std::string EstimatorName(EstimatorChoice e) {
  switch (e) {
    case EstimatorChoice::kAuto: return "auto";
    case EstimatorChoice::kExact: return "exact";
    case EstimatorChoice::kScoreFunction: return "score";
  }
  return "?";
}

}  // namespace

void TrainConfig::Validate() const {
  if (epochs < 0) throw ContractError("epochs must be >= 0");
  if (supervised_batch == 0 || unsupervised_batch == 0) {
    throw ContractError("batch sizes must be positive");
  }
  if (!(lambda >= 0.0)) throw ContractError("lambda must be nonnegative");
  if (!(optimizer.learning_rate > 0.0)) throw ContractError("learning rate must be positive");
  if (samples < 2) throw ContractError("samples must be >= 2");
  if (enumeration_limit == 0) throw ContractError("enumeration limit must be positive");
  if (checkpoint_every < 0) throw ContractError("checkpoint cadence must be >= 0");
  if (hidden == 0 || frames == 0) throw ContractError("hidden and frames must be positive");
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"epochs", epochs},
          {"supervised_batch", supervised_batch},
          {"unsupervised_batch", unsupervised_batch},
          {"lambda", lambda},
          {"optimizer", optimizer.kind == OptimizerKind::kAdam ? "adam" : "sgd"},
          {"learning_rate", optimizer.learning_rate},
          {"estimator", EstimatorName(estimator)},
          {"samples", samples},
          {"seed", seed},
          {"enumeration_limit", enumeration_limit},
          {"soft_targets", soft_targets},
          {"checkpoint_every", checkpoint_every},
          {"checkpoint_dir", checkpoint_dir},
          {"log_path", log_path},
          {"hidden", hidden},
          {"frames", frames},
          {"frame_dimension", frame_dimension}};
}

TrainConfig ParseTrainConfig(const std::string &text) {
  TrainConfig c;
  bool have_seed = false;
  std::istringstream lines(text);
  std::string raw;
  int line = 0;
  while (std::getline(lines, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::string s = Trim(raw);
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) throw FormatError("expected key = value", line);
    std::string key = Trim(s.substr(0, eq)), value = Trim(s.substr(eq + 1));
    if (key == "epochs") c.epochs = ParseNumber<int>(key, value, line);
    else if (key == "supervised_batch") c.supervised_batch = ParseNumber<std::size_t>(key, value, line);
    else if (key == "unsupervised_batch") c.unsupervised_batch = ParseNumber<std::size_t>(key, value, line);
    else if (key == "lambda") c.lambda = ParseNumber<double>(key, value, line);
    else if (key == "learning_rate") c.optimizer.learning_rate = ParseNumber<double>(key, value, line);
    else if (key == "optimizer") {
      if (value == "adam") c.optimizer.kind = OptimizerKind::kAdam;
      else if (value == "sgd") c.optimizer.kind = OptimizerKind::kGradientDescent;
      else throw FormatError("optimizer must be adam or sgd", line);
    } else if (key == "estimator") {
      if (value == "auto") c.estimator = EstimatorChoice::kAuto;
      else if (value == "exact") c.estimator = EstimatorChoice::kExact;
      else if (value == "score") c.estimator = EstimatorChoice::kScoreFunction;
      else throw FormatError("estimator must be auto, exact or score", line);
    } else if (key == "samples") c.samples = ParseNumber<std::size_t>(key, value, line);
    else if (key == "seed") {
      c.seed = ParseNumber<std::uint64_t>(key, value, line);
      have_seed = true;
    } else if (key == "enumeration_limit") c.enumeration_limit = ParseNumber<std::size_t>(key, value, line);
    else if (key == "soft_targets") c.soft_targets = ParseBool(key, value, line);
    else if (key == "checkpoint_every") c.checkpoint_every = ParseNumber<int>(key, value, line);
    else if (key == "checkpoint_dir") c.checkpoint_dir = value;
    else if (key == "log_path") c.log_path = value;
    else if (key == "hidden") c.hidden = ParseNumber<std::size_t>(key, value, line);
    else if (key == "frames") c.frames = ParseNumber<std::size_t>(key, value, line);
    else if (key == "frame_dimension") c.frame_dimension = ParseNumber<std::size_t>(key, value, line);
    else throw FormatError("unknown key '" + key + "'", line);
  }
  if (!have_seed) throw FormatError("config must set seed");
  try {
    c.Validate();
  } catch (const ContractError &e) {
    throw FormatError(e.what());
  }
  return c;
}

TrainConfig LoadTrainConfig(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseTrainConfig(buf.str());
}

ModelConfig ModelConfigFor(const TrainConfig &config) {
  ModelConfig m;
  m.hidden = config.hidden;
  m.frame_dimension = config.frame_dimension;
  m.seed = config.seed;
  m.enumeration_limit = config.enumeration_limit;
  return m;
}

TrainingReport Train(Model &model, const Dataset &dataset,
                     const TrainConfig &config, const EpochCallback &on_epoch) {
  config.Validate();
  const bool generative = model.generative();
  const std::size_t ns = dataset.supervised.size();
  const std::size_t nu = generative ? dataset.unsupervised.size() : 0;
  if (ns == 0 && nu == 0) throw ContractError("nothing to train on");
  if (!generative && ns == 0) {
    throw ContractError("the discriminative model needs supervised data");
  }

  ElboOptions elbo;
  Rng rng(config.seed);
  ScoreBaseline baseline;
  bool exact = config.estimator == EstimatorChoice::kExact ||
               (config.estimator == EstimatorChoice::kAuto &&
                model.cell_count() <= config.enumeration_limit);
  if (!exact) {
    elbo.estimator = ElboEstimator::kScoreFunction;
    elbo.samples = config.samples;
    elbo.rng = &rng;
    elbo.baseline = &baseline;
  }
  SupervisedOptions sup_options;
  sup_options.soft_targets = config.soft_targets;

  auto ceil_div = [](std::size_t a, std::size_t b) { return (a + b - 1) / b; };
  const std::size_t steps = std::max(ns ? ceil_div(ns, config.supervised_batch) : 0,
                                     nu ? ceil_div(nu, config.unsupervised_batch) : 0);

  std::ofstream log;
  if (!config.log_path.empty()) {
    auto parent = std::filesystem::path(config.log_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    log.open(config.log_path);
    if (!log) throw FormatError("cannot write log '" + config.log_path + "'");
  }
  auto write_checkpoint = [&](const std::string &name) {
    std::filesystem::create_directories(config.checkpoint_dir);
    std::string path = (std::filesystem::path(config.checkpoint_dir) / name).string();
    WriteCheckpoint(path, model.ToCheckpoint());
    return path;
  };

  Optimizer optimizer(config.optimizer);
  TrainingReport report;
  std::vector<std::size_t> sup_order(ns), unsup_order(nu);
  for (std::size_t i = 0; i < ns; ++i) sup_order[i] = i;
  for (std::size_t i = 0; i < nu; ++i) unsup_order[i] = i;
  auto start = std::chrono::steady_clock::now();

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.Shuffle(sup_order);
    rng.Shuffle(unsup_order);
    EpochRecord rec;
    rec.epoch = epoch;
    for (std::size_t step = 0; step < steps; ++step) {
      std::vector<SupervisedExample> sup;
      std::vector<Utterance> unsup;
      for (std::size_t j = 0; ns && j < std::min(config.supervised_batch, ns); ++j) {
        sup.push_back(dataset.supervised[sup_order[(step * config.supervised_batch + j) % ns]]);
      }
      for (std::size_t j = 0; nu && j < std::min(config.unsupervised_batch, nu); ++j) {
        unsup.push_back(dataset.unsupervised[unsup_order[(step * config.unsupervised_batch + j) % nu]]);
      }
      auto where = [&] {
        std::string first = !sup.empty() ? ToString(sup.front().utterance)
                                         : ToString(unsup.front());
        return "epoch " + std::to_string(epoch) + ", batch " + std::to_string(step + 1) +
               " (first utterance '" + first + "')";
      };
      try {
        model.parameters().ZeroGrad();
        Tensor s_loss, u_loss;
        if (!sup.empty()) s_loss = SupervisedLoss(model, sup, sup_options);
        if (!unsup.empty()) u_loss = Scale(Elbo(model, unsup, elbo).total, -1.0);
        Tensor loss = s_loss;
        if (generative && s_loss.defined()) loss = Scale(s_loss, config.lambda);
        if (u_loss.defined()) loss = loss.defined() ? Add(u_loss, loss) : u_loss;
        if (!std::isfinite(loss.item())) throw NumericalError("non-finite loss");
        loss.Backward();
        rec.supervised += s_loss.defined() ? s_loss.item() : 0.0;
        rec.unsupervised += u_loss.defined() ? u_loss.item() : 0.0;
        rec.total += loss.item();
        rec.grad_norm += model.parameters().GradNorm();
        optimizer.Step(model.parameters());
      } catch (const NumericalError &e) {
        throw NumericalError(std::string(e.what()) + " at " + where());
      }
    }
    double n = static_cast<double>(std::max<std::size_t>(steps, 1));
    rec.supervised /= n;
    rec.unsupervised /= n;
    rec.total /= n;
    rec.grad_norm /= n;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.epochs.push_back(rec);
    if (log) {
      log << nlohmann::json{{"epoch", rec.epoch}, {"S", rec.supervised},
                            {"U", rec.unsupervised}, {"L", rec.total},
                            {"grad_norm", rec.grad_norm}, {"seconds", rec.seconds}}
                 .dump()
          << '\n';
    }
    if (!config.checkpoint_dir.empty() && config.checkpoint_every > 0 &&
        epoch % config.checkpoint_every == 0) {
      write_checkpoint("epoch-" + std::to_string(epoch) + ".ckpt");
    }
    if (on_epoch) on_epoch(epoch, model);
  }
  if (!config.checkpoint_dir.empty()) report.final_checkpoint = write_checkpoint("final.ckpt");
  return report;
}

void ExcludeTestDenominals(Fold &fold) {
  std::set<std::string> targets;
  for (const auto &ex : fold.test.supervised) targets.insert(ex.utterance.denominal);
  std::vector<SupervisedExample> sup;
  for (auto &ex : fold.train.supervised) {
    if (!targets.count(ex.utterance.denominal)) sup.push_back(std::move(ex));
  }
  fold.train.supervised = std::move(sup);
  std::vector<Utterance> unsup;
  std::vector<std::optional<int>> decades;
  for (std::size_t i = 0; i < fold.train.unsupervised.size(); ++i) {
    if (targets.count(fold.train.unsupervised[i].denominal)) continue;
    unsup.push_back(fold.train.unsupervised[i]);
    decades.push_back(i < fold.train.unsupervised_decades.size()
                          ? fold.train.unsupervised_decades[i]
                          : std::nullopt);
  }
  fold.train.unsupervised = std::move(unsup);
  fold.train.unsupervised_decades = std::move(decades);
}

std::vector<FoldResult> CrossValidate(const ModelFactory &factory,
                                      const Dataset &dataset, int k,
                                      const TrainConfig &config,
                                      const FoldEvaluator &evaluate) {
  if (k < 2) throw ContractError("cross-validation needs k >= 2");
  auto folds = KFoldSplit(dataset, k, config.seed);
  std::vector<FoldResult> out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    Fold &fold = folds[f];
    ExcludeTestDenominals(fold);
    auto context = [&](const std::exception &e) {
      return "fold " + std::to_string(f + 1) + ": " + e.what();
    };
    try {
      Model model = factory(fold);
      FoldResult r;
      r.fold = static_cast<int>(f + 1);
      TrainConfig fold_config = config;
      if (!fold_config.checkpoint_dir.empty()) {
        fold_config.checkpoint_dir += "/fold-" + std::to_string(f + 1);
      }
      if (!fold_config.log_path.empty()) {
        fold_config.log_path += ".fold-" + std::to_string(f + 1);
      }
      r.report = Train(model, fold.train, fold_config);
      r.metrics = evaluate(model, fold);
      out.push_back(std::move(r));
    } catch (const NumericalError &e) {
      throw NumericalError(context(e));
    } catch (const FormatError &e) {
      throw FormatError(context(e));
    } catch (const ContractError &e) {
      throw ContractError(context(e));
    }
  }
  return out;
}

MetricBundle MeanMetrics(const std::vector<FoldResult> &results) {
  MetricBundle sum;
  std::map<std::string, int> count;
  for (const auto &r : results) {
    for (const auto &[k, v] : r.metrics) {
      sum[k] += v;
      ++count[k];
    }
  }
  for (auto &[k, v] : sum) v /= count[k];
  return sum;
}

}  // namespace noun2verb
