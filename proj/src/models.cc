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

#include "noun2verb/models.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "noun2verb/errors.h"

namespace noun2verb {
namespace {

constexpr double kPriorTolerance = 1e-9;

std::size_t RelationSlot(Relation r) { return static_cast<std::size_t>(r); }

std::vector<double> Uniform(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

void CheckCategorical(const std::vector<double> &p, std::size_t n,
                      const char *what) {
  if (p.size() != n) {
    throw ContractError(std::string(what) + " prior has " +
                        std::to_string(p.size()) + " entries, expected " +
                        std::to_string(n));
  }
  double total = 0.0;
  for (double x : p) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ContractError(std::string(what) + " prior entries must be positive");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kPriorTolerance) {
    throw ContractError(std::string(what) + " prior sums to " +
                        std::to_string(total));
  }
}

std::vector<double> Exponentiate(std::span<const double> logs) {
  std::vector<double> out(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) out[i] = std::exp(logs[i]);
  return out;
}

std::vector<double> NegLog(const std::vector<double> &p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = -std::log(p[i]);
  return out;
}

double LogSumExp(std::span<const double> x) {
  double mx = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(mx)) return mx;
  double z = 0.0;
  for (double v : x) z += std::exp(v - mx);
  return mx + std::log(z);
}

Tensor Linear(const Tensor &x, const ParameterSet &p, const std::string &name) {
  return AddRowVector(MatMul(x, p.at(name + "_w")), p.at(name + "_b"));
}

template <typename Map>
std::optional<std::size_t> Lookup(const Map &map, std::string_view key) {
  auto it = map.find(key);
  if (it == map.end()) return std::nullopt;
  return it->second;
}

}  // namespace

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDiscriminative: return "discriminative";
    case ModelKind::kPartial: return "partial";
    case ModelKind::kFull: return "full";
  }
  return "?";
}

std::optional<ModelKind> ParseModelKind(std::string_view name) {
  for (ModelKind k : {ModelKind::kDiscriminative, ModelKind::kPartial,
                      ModelKind::kFull}) {
    if (ModelKindName(k) == name) return k;
  }
  return std::nullopt;
}

void HeadSpec::Validate() const {
  auto check = [](const std::vector<std::string> &list, const char *what) {
    if (list.empty()) throw ContractError(std::string(what) + " candidates are empty");
    std::set<std::string> seen(list.begin(), list.end());
    if (seen.size() != list.size()) {
      throw ContractError(std::string(what) + " candidates repeat a token");
    }
  };
  check(denominals, "denominal");
  check(contexts, "context");
  check(verbs, "verb");
  if (relations.empty()) throw ContractError("relation head is empty");
  std::set<Relation> seen(relations.begin(), relations.end());
  if (seen.size() != relations.size()) {
    throw ContractError("relation head repeats a relation");
  }
  if (frames < 1) throw ContractError("frame cardinality must be >= 1");
}

HeadSpec HeadSpec::FromDataset(const Dataset &dataset, std::size_t frames) {
  std::set<std::string> d, c, v;
  std::set<Relation> r;
  for (const auto &ex : dataset.supervised) {
    d.insert(ex.utterance.denominal);
    c.insert(ex.utterance.context);
    for (const auto &g : ex.gold) {
      v.insert(g.interpretation.verb);
      r.insert(g.interpretation.relation);
    }
  }
  for (const auto &u : dataset.unsupervised) {
    d.insert(u.denominal);
    c.insert(u.context);
  }
  HeadSpec spec;
  spec.denominals.assign(d.begin(), d.end());
  spec.contexts.assign(c.begin(), c.end());
  spec.verbs.assign(v.begin(), v.end());
  spec.frames = frames;
  return spec;
}

double LatentPosterior::Joint(std::size_t v, std::size_t r, std::size_t e) const {
  double p = verb.at(v) * relation.at(r);
  if (!frame.empty()) p *= frame.at(e);
  return p;
}

Model::Model(ModelKind kind, HeadSpec heads, EmbeddingTable embeddings,
             ModelConfig config)
    : kind_(kind),
      heads_(std::move(heads)),
      embeddings_(std::move(embeddings)),
      config_(config) {
  heads_.Validate();
  if (embeddings_.dimension() == 0) {
    throw ContractError("model needs a nonempty embedding table");
  }
  if (config_.hidden == 0) throw ContractError("hidden width must be >= 1");
  if (config_.frame_dimension == 0) {
    config_.frame_dimension = embeddings_.dimension();
  }
  Build();
}

void Model::Build() {
  const std::size_t d = embeddings_.dimension();
  const std::size_t h = config_.hidden;
  const std::size_t df = config_.frame_dimension;
  const std::size_t nv = heads_.verbs.size();
  const std::size_t nr = heads_.relations.size();
  const std::size_t k = heads_.frames;
  Rng rng(config_.seed);

  // Glorot-uniform block of a layer with the given total fan-in.
  auto glorot = [&](const std::string &name, std::size_t rows, std::size_t cols,
                    std::size_t fan_in) {
    double limit = std::sqrt(6.0 / static_cast<double>(fan_in + cols));
    std::vector<double> values(rows * cols);
    for (double &v : values) v = rng.Uniform(-limit, limit);
    params_.Add(name, {rows, cols}, std::move(values));
  };
  auto layer = [&](const std::string &name, std::size_t in, std::size_t out) {
    glorot(name + "_w", in, out, in);
    params_.AddZeros(name + "_b", {out});
  };

  layer("listener/hidden1", 2 * d, h);
  layer("listener/hidden2", h, h);
  layer("listener/verb", h, nv);
  layer("listener/relation", h, nr);
  if (has_frames()) layer("listener/frame", h, k);

  const std::size_t speaker_in = d + (d + kNumRelations) + (has_frames() ? df : 0);
  glorot("speaker/hidden1_verb", d, h, speaker_in);
  glorot("speaker/hidden1_relation", d + kNumRelations, h, speaker_in);
  if (has_frames()) {
    // Frame embeddings start at word-embedding scale so the frames are
    // distinguishable from the first step.
    std::vector<double> table(k * df);
    for (double &v : table) v = rng.Normal();
    params_.Add("speaker/frame_table", {k, df}, std::move(table));
    glorot("speaker/hidden1_frame", df, h, speaker_in);
  }
  params_.AddZeros("speaker/hidden1_b", {h});
  layer("speaker/hidden2", h, h);
  layer("speaker/denominal", h, heads_.denominals.size());
  layer("speaker/context", h, heads_.contexts.size());

  std::vector<double> vin;
  vin.reserve(nv * d);
  for (const auto &v : heads_.verbs) {
    auto row = embeddings_.Embed(v);
    vin.insert(vin.end(), row.begin(), row.end());
  }
  verb_inputs_ = Tensor::Constant({nv, d}, std::move(vin));
  std::vector<double> rin;
  rin.reserve(nr * (d + kNumRelations));
  for (Relation r : heads_.relations) {
    auto row = embeddings_.Embed(RelationHeadWord(r));
    rin.insert(rin.end(), row.begin(), row.end());
    for (std::size_t j = 0; j < kNumRelations; ++j) {
      rin.push_back(j == RelationSlot(r) ? 1.0 : 0.0);
    }
  }
  relation_inputs_ = Tensor::Constant({nr, d + kNumRelations}, std::move(rin));

  for (std::size_t i = 0; i < nv; ++i) verb_index_.emplace(heads_.verbs[i], i);
  for (std::size_t i = 0; i < heads_.denominals.size(); ++i) {
    denominal_index_.emplace(heads_.denominals[i], i);
  }
  for (std::size_t i = 0; i < heads_.contexts.size(); ++i) {
    context_index_.emplace(heads_.contexts[i], i);
  }
  if (generative()) {
    priors_.verb = Uniform(nv);
    priors_.relation = Uniform(nr);
    if (has_frames()) priors_.frame = Uniform(k);
  }
}

std::size_t Model::cell_count() const {
  return heads_.verbs.size() * heads_.relations.size() * frame_count();
}

Cell Model::DecodeCell(std::size_t cell) const {
  if (cell >= cell_count()) throw IndexError("cell index out of range");
  std::size_t k = frame_count(), nr = heads_.relations.size();
  return {cell / (nr * k), (cell / k) % nr, cell % k};
}

std::size_t Model::EncodeCell(const Cell &cell) const {
  return (cell.verb * heads_.relations.size() + cell.relation) * frame_count() +
         cell.frame;
}

std::optional<std::size_t> Model::VerbIndex(std::string_view verb) const {
  return Lookup(verb_index_, verb);
}

std::optional<std::size_t> Model::RelationIndex(Relation relation) const {
  auto it = std::find(heads_.relations.begin(), heads_.relations.end(), relation);
  if (it == heads_.relations.end()) return std::nullopt;
  return static_cast<std::size_t>(it - heads_.relations.begin());
}

std::optional<std::size_t> Model::DenominalIndex(std::string_view token) const {
  return Lookup(denominal_index_, token);
}

std::optional<std::size_t> Model::ContextIndex(std::string_view token) const {
  return Lookup(context_index_, token);
}

PriorDistributions Model::Priors() const {
  if (!generative()) throw ContractError("the discriminative model has no priors");
  return priors_;
}

void Model::SetPriors(const PriorDistributions &priors) {
  if (!generative()) throw ContractError("the discriminative model has no priors");
  CheckCategorical(priors.verb, heads_.verbs.size(), "verb");
  CheckCategorical(priors.relation, heads_.relations.size(), "relation");
  if (has_frames()) {
    CheckCategorical(priors.frame, heads_.frames, "frame");
  } else if (!priors.frame.empty()) {
    throw ContractError("frame prior given for a model without frames");
  }
  priors_ = priors;
}

std::vector<std::string> Model::ListenerParameterNames() const {
  std::vector<std::string> out;
  for (const auto &name : params_.Names()) {
    if (name.rfind("listener/", 0) == 0) out.push_back(name);
  }
  return out;
}

std::vector<std::string> Model::SpeakerParameterNames() const {
  std::vector<std::string> out;
  for (const auto &name : params_.Names()) {
    if (name.rfind("speaker/", 0) == 0) out.push_back(name);
  }
  return out;
}

Model::ListenerLogits Model::ListenerLogProbs(
    std::span<const Utterance> utterances) const {
  if (utterances.empty()) throw ContractError("listener needs at least one utterance");
  const std::size_t d = embeddings_.dimension();
  std::vector<double> x;
  x.reserve(utterances.size() * 2 * d);
  for (const auto &u : utterances) {
    auto a = embeddings_.Embed(u.denominal);
    auto b = embeddings_.Embed(u.context);
    x.insert(x.end(), a.begin(), a.end());
    x.insert(x.end(), b.begin(), b.end());
  }
  Tensor input = Tensor::Constant({utterances.size(), 2 * d}, std::move(x));
  Tensor h1 = Tanh(Linear(input, params_, "listener/hidden1"));
  Tensor h2 = Tanh(Linear(h1, params_, "listener/hidden2"));
  ListenerLogits out;
  out.verb = LogSoftmax(Linear(h2, params_, "listener/verb"));
  out.relation = LogSoftmax(Linear(h2, params_, "listener/relation"));
  if (has_frames()) out.frame = LogSoftmax(Linear(h2, params_, "listener/frame"));
  return out;
}

Model::SpeakerLogits Model::SpeakerLogProbs(std::span<const Cell> cells) const {
  if (cells.empty()) throw ContractError("speaker needs at least one cell");
  std::vector<std::size_t> v(cells.size()), r(cells.size()), e(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].verb >= heads_.verbs.size() ||
        cells[i].relation >= heads_.relations.size() ||
        cells[i].frame >= frame_count()) {
      throw ContractError("speaker cell outside the head ranges");
    }
    v[i] = cells[i].verb;
    r[i] = cells[i].relation;
    e[i] = cells[i].frame;
  }
  // The first layer is linear in the concatenated input, so each block is
  // projected once per candidate and gathered per cell.
  Tensor pre = Add(GatherRows(MatMul(verb_inputs_, params_.at("speaker/hidden1_verb")), v),
                   GatherRows(MatMul(relation_inputs_,
                                     params_.at("speaker/hidden1_relation")), r));
  if (has_frames()) {
    Tensor frames = MatMul(params_.at("speaker/frame_table"),
                           params_.at("speaker/hidden1_frame"));
    pre = Add(pre, GatherRows(frames, e));
  }
  Tensor h1 = Tanh(AddRowVector(pre, params_.at("speaker/hidden1_b")));
  Tensor h2 = Tanh(Linear(h1, params_, "speaker/hidden2"));
  SpeakerLogits out;
  out.denominal = LogSoftmax(Linear(h2, params_, "speaker/denominal"));
  out.context = LogSoftmax(Linear(h2, params_, "speaker/context"));
  return out;
}

Model::SpeakerLogits Model::SpeakerLogProbsAllCells() const {
  std::vector<Cell> cells(cell_count());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = DecodeCell(i);
  return SpeakerLogProbs(cells);
}

LatentPosterior Model::ListenerPosterior(const Utterance &utterance) const {
  auto logits = ListenerLogProbs(std::span(&utterance, 1));
  LatentPosterior out;
  out.verb = Exponentiate(logits.verb.values());
  out.relation = Exponentiate(logits.relation.values());
  if (has_frames()) out.frame = Exponentiate(logits.frame.values());
  return out;
}

SpeakerDistribution Model::SpeakerLikelihood(const Interpretation &interpretation,
                                             std::optional<std::size_t> frame) const {
  if (has_frames() != frame.has_value()) {
    throw ContractError(has_frames() ? "the full model needs a frame index"
                                     : "this model has no frame variable");
  }
  Cell cell;
  auto v = VerbIndex(interpretation.verb);
  auto r = RelationIndex(interpretation.relation);
  if (!v) throw ContractError("verb '" + interpretation.verb + "' is not a candidate");
  if (!r) throw ContractError("relation outside the relation head");
  cell.verb = *v;
  cell.relation = *r;
  if (frame) {
    if (*frame >= heads_.frames) {
      throw ContractError("frame index " + std::to_string(*frame) +
                          " >= K = " + std::to_string(heads_.frames));
    }
    cell.frame = *frame;
  }
  auto logits = SpeakerLogProbs(std::span(&cell, 1));
  return {Exponentiate(logits.denominal.values()),
          Exponentiate(logits.context.values())};
}

Checkpoint Model::ToCheckpoint() const {
  Checkpoint ckpt;
  nlohmann::json m;
  m["kind"] = std::string(ModelKindName(kind_));
  m["denominals"] = heads_.denominals;
  m["contexts"] = heads_.contexts;
  m["verbs"] = heads_.verbs;
  std::vector<std::string> rel;
  for (Relation r : heads_.relations) rel.emplace_back(RelationSymbol(r));
  m["relations"] = rel;
  m["frames"] = heads_.frames;
  m["hidden"] = config_.hidden;
  m["frame_dimension"] = config_.frame_dimension;
  m["seed"] = config_.seed;
  m["enumeration_limit"] = config_.enumeration_limit;
  m["embedding_tokens"] = embeddings_.tokens();
  m["embedding_dimension"] = embeddings_.dimension();
  ckpt.manifest["model"] = m;
  for (const auto &[name, t] : params_) {
    ckpt.tensors.emplace(name, Tensor::Constant(t.shape(),
                                                {t.values().begin(), t.values().end()}));
  }
  ckpt.tensors.emplace("embeddings/rows",
                       Tensor::Constant({embeddings_.size(), embeddings_.dimension()},
                                        embeddings_.rows()));
  if (generative()) {
    ckpt.tensors.emplace("prior/verb", Tensor::Constant({priors_.verb.size()}, priors_.verb));
    ckpt.tensors.emplace("prior/relation",
                         Tensor::Constant({priors_.relation.size()}, priors_.relation));
    if (has_frames()) {
      ckpt.tensors.emplace("prior/frame",
                           Tensor::Constant({priors_.frame.size()}, priors_.frame));
    }
  }
  return ckpt;
}

Model Model::FromCheckpoint(const Checkpoint &checkpoint) {
  if (!checkpoint.manifest.contains("model")) {
    throw FormatError("checkpoint has no model manifest");
  }
  auto tensor = [&](const std::string &name) -> const Tensor & {
    auto it = checkpoint.tensors.find(name);
    if (it == checkpoint.tensors.end()) {
      throw FormatError("checkpoint lacks tensor '" + name + "'");
    }
    return it->second;
  };
  try {
    const auto &m = checkpoint.manifest.at("model");
    auto kind = ParseModelKind(m.at("kind").get<std::string>());
    if (!kind) throw FormatError("unknown model kind in checkpoint");
    HeadSpec heads;
    heads.denominals = m.at("denominals").get<std::vector<std::string>>();
    heads.contexts = m.at("contexts").get<std::vector<std::string>>();
    heads.verbs = m.at("verbs").get<std::vector<std::string>>();
    heads.relations.clear();
    for (const auto &s : m.at("relations").get<std::vector<std::string>>()) {
      auto r = ParseRelation(s);
      if (!r) throw FormatError("unknown relation '" + s + "' in checkpoint");
      heads.relations.push_back(*r);
    }
    heads.frames = m.at("frames").get<std::size_t>();
    ModelConfig config;
    config.hidden = m.at("hidden").get<std::size_t>();
    config.frame_dimension = m.at("frame_dimension").get<std::size_t>();
    config.seed = m.at("seed").get<std::uint64_t>();
    config.enumeration_limit = m.at("enumeration_limit").get<std::size_t>();
    const Tensor &rows = tensor("embeddings/rows");
    EmbeddingTable table(m.at("embedding_dimension").get<std::size_t>(),
                         m.at("embedding_tokens").get<std::vector<std::string>>(),
                         {rows.values().begin(), rows.values().end()});
    Model model(*kind, std::move(heads), std::move(table), config);
    for (auto &[name, param] : model.params_) {
      const Tensor &src = tensor(name);
      if (src.shape() != param.shape()) {
        throw FormatError("tensor '" + name + "' has shape " +
                          ShapeToString(src.shape()) + ", expected " +
                          ShapeToString(param.shape()));
      }
      std::copy(src.values().begin(), src.values().end(),
                param.mutable_values().begin());
    }
    if (model.generative()) {
      PriorDistributions p;
      auto vec = [&](const std::string &name) {
        const Tensor &t = tensor(name);
        return std::vector<double>(t.values().begin(), t.values().end());
      };
      p.verb = vec("prior/verb");
      p.relation = vec("prior/relation");
      if (model.has_frames()) p.frame = vec("prior/frame");
      model.SetPriors(p);
    }
    return model;
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(std::string("bad model manifest: ") + e.what());
  }
}

void ZeroParameters(Model &model) {
  for (auto &[name, t] : model.parameters()) {
    auto v = t.mutable_values();
    std::fill(v.begin(), v.end(), 0.0);
  }
}

namespace {

struct UtteranceIndex {
  std::size_t denominal;
  std::size_t context;
};

UtteranceIndex SpeakerTargets(const Model &model, const Utterance &u) {
  auto d = model.DenominalIndex(u.denominal);
  auto c = model.ContextIndex(u.context);
  if (!d || !c) {
    throw ContractError("utterance '" + ToString(u) +
                        "' is outside the speaker's candidate lists");
  }
  return {*d, *c};
}

// log p_0(cell) + log p_s(U | cell) for every cell.
std::vector<double> LogJointAllCells(const Model &model, const Utterance &u) {
  auto target = SpeakerTargets(model, u);
  auto priors = model.Priors();
  auto logits = model.SpeakerLogProbsAllCells();
  std::size_t nd = model.heads().denominals.size();
  std::size_t nc = model.heads().contexts.size();
  std::vector<double> out(model.cell_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    Cell cell = model.DecodeCell(i);
    double lp = std::log(priors.verb[cell.verb]) +
                std::log(priors.relation[cell.relation]);
    if (model.has_frames()) lp += std::log(priors.frame[cell.frame]);
    out[i] = lp + logits.denominal.values()[i * nd + target.denominal] +
             logits.context.values()[i * nc + target.context];
  }
  return out;
}

}  // namespace

std::vector<double> ListenerJoint(const Model &model, const Utterance &utterance) {
  auto post = model.ListenerPosterior(utterance);
  std::vector<double> out(model.cell_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    Cell c = model.DecodeCell(i);
    out[i] = post.Joint(c.verb, c.relation, c.frame);
  }
  return out;
}

std::vector<double> SpeakerPosterior(const Model &model, const Utterance &utterance) {
  auto logs = LogJointAllCells(model, utterance);
  double z = LogSumExp(logs);
  for (double &x : logs) x = std::exp(x - z);
  return logs;
}

double LogMarginal(const Model &model, const Utterance &utterance) {
  return LogSumExp(LogJointAllCells(model, utterance));
}

double ElboForPosterior(const Model &model, const Utterance &utterance,
                        std::span<const double> q) {
  if (q.size() != model.cell_count()) {
    throw ContractError("posterior has " + std::to_string(q.size()) +
                        " cells, expected " + std::to_string(model.cell_count()));
  }
  auto logs = LogJointAllCells(model, utterance);
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) total += q[i] * (logs[i] - std::log(q[i]));
  }
  return total;
}

namespace {

ElboResult ExactElbo(const Model &model, std::span<const Utterance> utterances) {
  if (model.cell_count() > model.config().enumeration_limit) {
    throw ContractError("latent space has " + std::to_string(model.cell_count()) +
                        " cells, over the enumeration limit of " +
                        std::to_string(model.config().enumeration_limit) +
                        "; use the score-function estimator");
  }
  std::vector<std::size_t> d(utterances.size()), c(utterances.size());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    auto t = SpeakerTargets(model, utterances[i]);
    d[i] = t.denominal;
    c[i] = t.context;
  }
  auto priors = model.Priors();
  auto speaker = model.SpeakerLogProbsAllCells();
  Tensor log_speaker = Add(GatherRows(Transpose(speaker.denominal), d),
                           GatherRows(Transpose(speaker.context), c));
  auto listener = model.ListenerLogProbs(utterances);
  Tensor pv = Exp(listener.verb), pr = Exp(listener.relation);
  Tensor weights = RowKron(pv, pr);
  auto kl_term = [](const Tensor &p, const Tensor &logp,
                    const std::vector<double> &prior) {
    Tensor neg = Tensor::Constant({prior.size()}, NegLog(prior));
    return SumRows(Mul(p, AddRowVector(logp, neg)));
  };
  Tensor kl = Add(kl_term(pv, listener.verb, priors.verb),
                  kl_term(pr, listener.relation, priors.relation));
  if (model.has_frames()) {
    Tensor pe = Exp(listener.frame);
    weights = RowKron(weights, pe);
    kl = Add(kl, kl_term(pe, listener.frame, priors.frame));
  }
  Tensor elbo = Sub(SumRows(Mul(weights, log_speaker)), kl);
  ElboResult out;
  out.values.assign(elbo.values().begin(), elbo.values().end());
  out.standard_errors.assign(utterances.size(), 0.0);
  out.total = Sum(elbo);
  return out;
}

ElboResult ScoreFunctionElbo(const Model &model,
                             std::span<const Utterance> utterances,
                             const ElboOptions &options) {
  if (options.rng == nullptr) {
    throw ContractError("the score-function estimator needs an Rng");
  }
  if (options.samples < 2) {
    throw ContractError("the score-function estimator needs >= 2 samples");
  }
  const std::size_t n = utterances.size(), s = options.samples;
  Rng &rng = *options.rng;
  auto priors = model.Priors();
  auto listener = model.ListenerLogProbs(utterances);
  const std::size_t nv = model.heads().verbs.size();
  const std::size_t nr = model.heads().relations.size();
  const std::size_t k = model.frame_count();

  std::vector<Cell> cells(n * s);
  std::vector<std::size_t> row(n * s), d(n * s), c(n * s), v(n * s), r(n * s),
      e(n * s);
  std::vector<double> log_prior(n * s);
  for (std::size_t i = 0; i < n; ++i) {
    auto target = SpeakerTargets(model, utterances[i]);
    auto pv = Exponentiate(listener.verb.values().subspan(i * nv, nv));
    auto pr = Exponentiate(listener.relation.values().subspan(i * nr, nr));
    std::vector<double> pe;
    if (model.has_frames()) pe = Exponentiate(listener.frame.values().subspan(i * k, k));
    for (std::size_t j = 0; j < s; ++j) {
      std::size_t at = i * s + j;
      Cell &cell = cells[at];
      cell.verb = rng.Categorical(pv);
      cell.relation = rng.Categorical(pr);
      if (model.has_frames()) cell.frame = rng.Categorical(pe);
      row[at] = i;
      d[at] = target.denominal;
      c[at] = target.context;
      v[at] = cell.verb;
      r[at] = cell.relation;
      e[at] = cell.frame;
      log_prior[at] = std::log(priors.verb[cell.verb]) +
                      std::log(priors.relation[cell.relation]) +
                      (model.has_frames() ? std::log(priors.frame[cell.frame]) : 0.0);
    }
  }
  auto speaker = model.SpeakerLogProbs(cells);
  Tensor log_q = Add(Pick(GatherRows(listener.verb, row), v),
                     Pick(GatherRows(listener.relation, row), r));
  if (model.has_frames()) log_q = Add(log_q, Pick(GatherRows(listener.frame, row), e));
  Tensor f = Sub(Add(Add(Pick(speaker.denominal, d), Pick(speaker.context, c)),
                     Tensor::Constant({n * s}, log_prior)),
                 log_q);

  ScoreBaseline local;
  ScoreBaseline &baseline = options.baseline ? *options.baseline : local;
  auto fv = f.values();
  std::vector<double> advantage(n * s);
  ElboResult out;
  out.values.resize(n);
  out.standard_errors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto seg = fv.subspan(i * s, s);
    double sum = std::accumulate(seg.begin(), seg.end(), 0.0);
    double mean = sum / static_cast<double>(s);
    double ss = 0.0;
    for (double x : seg) ss += (x - mean) * (x - mean);
    out.values[i] = mean;
    out.standard_errors[i] =
        std::sqrt(ss / static_cast<double>(s - 1)) / std::sqrt(static_cast<double>(s));
    auto it = baseline.values.find(utterances[i]);
    for (std::size_t j = 0; j < s; ++j) {
      // Without history, a leave-one-out mean keeps the estimator unbiased.
      double b = it != baseline.values.end()
                     ? it->second
                     : (sum - seg[j]) / static_cast<double>(s - 1);
      advantage[i * s + j] = seg[j] - b;
    }
    if (it == baseline.values.end()) {
      baseline.values.emplace(utterances[i], mean);
    } else {
      it->second = baseline.decay * it->second + (1.0 - baseline.decay) * mean;
    }
  }
  // The second term has value zero and contributes the score-function
  // gradient (f - b) * d log q.
  Tensor score = Mul(Tensor::Constant({n * s}, advantage), Sub(log_q, Detach(log_q)));
  Tensor per_sample = Add(f, score);
  out.total = Scale(Sum(per_sample), 1.0 / static_cast<double>(s));
  return out;
}

}  // namespace

ElboResult Elbo(const Model &model, std::span<const Utterance> utterances,
                const ElboOptions &options) {
  if (!model.generative()) {
    throw ContractError("the ELBO is defined for generative models only");
  }
  if (utterances.empty()) throw ContractError("ELBO needs at least one utterance");
  if (options.estimator == ElboEstimator::kExact) return ExactElbo(model, utterances);
  return ScoreFunctionElbo(model, utterances, options);
}

Tensor SupervisedLoss(const Model &model, std::span<const SupervisedExample> batch,
                      const SupervisedOptions &options) {
  if (batch.empty()) throw ContractError("supervised loss needs a nonempty batch");
  const std::size_t n = batch.size();
  const std::size_t nv = model.heads().verbs.size();
  const std::size_t k = model.frame_count();
  std::vector<Utterance> utterances;
  std::vector<std::size_t> relation(n);
  // Speaker terms: (example, verb, weight) entries, each marginalized over
  // frames for the full model.
  std::vector<std::size_t> entry_example, entry_verb;
  std::vector<double> entry_weight;
  std::vector<double> verb_targets(n * nv, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto &ex = batch[i];
    utterances.push_back(ex.utterance);
    auto ranked = ex.RankedGold();
    const GoldInterpretation *top = nullptr;
    for (const auto &g : ranked) {
      if (g.votes > 0 && model.VerbIndex(g.interpretation.verb)) {
        top = &g;
        break;
      }
    }
    if (top == nullptr) {
      throw ContractError("no gold verb of '" + ToString(ex.utterance) +
                          "' is a verb candidate");
    }
    auto r = model.RelationIndex(top->interpretation.relation);
    if (!r) throw ContractError("gold relation outside the relation head");
    relation[i] = *r;
    if (options.soft_targets) {
      auto dist = EmpiricalDistribution(ex);
      double mass = 0.0;
      for (std::size_t j = 0; j < dist.support.size(); ++j) {
        if (model.VerbIndex(dist.support[j])) mass += dist.probabilities[j];
      }
      for (std::size_t j = 0; j < dist.support.size(); ++j) {
        auto v = model.VerbIndex(dist.support[j]);
        if (!v) continue;
        double w = dist.probabilities[j] / mass;
        verb_targets[i * nv + *v] += w;
        entry_example.push_back(i);
        entry_verb.push_back(*v);
        entry_weight.push_back(w);
      }
    } else {
      std::size_t v = *model.VerbIndex(top->interpretation.verb);
      verb_targets[i * nv + v] = 1.0;
      entry_example.push_back(i);
      entry_verb.push_back(v);
      entry_weight.push_back(1.0);
    }
  }
  auto listener = model.ListenerLogProbs(utterances);
  Tensor listener_loss =
      Add(Sum(Mul(Tensor::Constant({n, nv}, verb_targets), listener.verb)),
          Sum(Pick(listener.relation, relation)));

  const std::size_t m = entry_example.size();
  std::vector<Cell> cells;
  std::vector<std::size_t> d, c;
  for (std::size_t j = 0; j < m; ++j) {
    auto target = SpeakerTargets(model, utterances[entry_example[j]]);
    for (std::size_t e = 0; e < k; ++e) {
      cells.push_back({entry_verb[j], relation[entry_example[j]], e});
      d.push_back(target.denominal);
      c.push_back(target.context);
    }
  }
  auto speaker = model.SpeakerLogProbs(cells);
  Tensor per_cell = Add(Pick(speaker.denominal, d), Pick(speaker.context, c));
  Tensor per_entry;
  if (model.has_frames()) {
    Tensor log_beta = Tensor::Constant({k}, NegLog(model.Priors().frame));
    per_entry = LogSumExpRows(
        AddRowVector(Reshape(per_cell, {m, k}), Scale(log_beta, -1.0)));
  } else {
    per_entry = per_cell;
  }
  Tensor speaker_loss = Sum(Mul(Tensor::Constant({m}, entry_weight), per_entry));
  return Scale(Add(listener_loss, speaker_loss), -1.0);
}

Tensor SemiSupervisedLoss(const Model &model,
                          std::span<const SupervisedExample> supervised,
                          std::span<const Utterance> unsupervised, double lambda,
                          const ElboOptions &elbo, const SupervisedOptions &options) {
  if (!model.generative()) {
    throw ContractError("the semi-supervised loss needs a generative model");
  }
  if (!(lambda >= 0.0)) throw ContractError("lambda must be nonnegative");
  Tensor loss;
  if (!unsupervised.empty()) {
    loss = Scale(Elbo(model, unsupervised, elbo).total, -1.0);
  }
  if (!supervised.empty()) {
    Tensor s = Scale(SupervisedLoss(model, supervised, options), lambda);
    loss = loss.defined() ? Add(loss, s) : s;
  }
  if (!loss.defined()) throw ContractError("both batches are empty");
  return loss;
}

}  // namespace noun2verb
