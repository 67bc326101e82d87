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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "noun2verb/errors.h"
#include "noun2verb/random.h"

namespace noun2verb {
namespace {

// Frame weights w_e such that the marginal is sum_e w_e f(e): the prior
// itself when enumerating, sample frequencies otherwise.
std::vector<double> FrameWeights(const Model &model, const FrameSampleConfig &frames) {
  if (!model.has_frames()) return {1.0};
  auto beta = model.Priors().frame;
  bool exact = frames.mode == FrameSampleConfig::Mode::kExact ||
               (frames.mode == FrameSampleConfig::Mode::kAuto &&
                beta.size() <= kExactFrameLimit);
  if (exact) return beta;
  if (frames.samples < 1) throw ContractError("frame sample count must be >= 1");
  Rng rng(frames.seed);
  std::vector<double> w(beta.size(), 0.0);
  for (std::size_t s = 0; s < frames.samples; ++s) w[rng.Categorical(beta)] += 1.0;
  for (double &x : w) x /= static_cast<double>(frames.samples);
  return w;
}

void CheckK(int k) {
  if (k < 1) throw ContractError("k must be >= 1");
}

template <typename T>
RankedList<T> Truncate(RankedList<T> list, int k) {
  if (list.size() > static_cast<std::size_t>(k)) list.resize(k);
  return list;
}

}  // namespace

RankedList<Interpretation> RankInterpretations(const Model &model,
                                               const Utterance &utterance,
                                               const FrameSampleConfig &frames) {
  auto post = model.ListenerPosterior(utterance);
  auto w = FrameWeights(model, frames);
  const auto &heads = model.heads();
  RankedList<Interpretation> out;
  double total = 0.0;
  for (std::size_t v = 0; v < heads.verbs.size(); ++v) {
    for (std::size_t r = 0; r < heads.relations.size(); ++r) {
      double p = 0.0;
      for (std::size_t e = 0; e < w.size(); ++e) {
        if (w[e] > 0.0) p += w[e] * post.Joint(v, r, e);
      }
      out.push_back({{heads.verbs[v], heads.relations[r]}, p});
      total += p;
    }
  }
  for (auto &s : out) s.score /= total;
  SortRanked(out);
  return out;
}

RankedList<Interpretation> Comprehend(const Model &model, const Utterance &utterance,
                                      int k, const FrameSampleConfig &frames) {
  CheckK(k);
  return Truncate(RankInterpretations(model, utterance, frames), k);
}

RankedList<Utterance> RankUtterances(const Model &model,
                                     const Interpretation &interpretation,
                                     const FrameSampleConfig &frames,
                                     const std::vector<Utterance> *candidates) {
  const auto &heads = model.heads();
  std::vector<Utterance> pool;
  if (candidates) {
    pool = *candidates;
  } else {
    if (heads.denominals.size() * heads.contexts.size() > kProductionCellCap) {
      throw ContractError("candidate space exceeds the production cap; pass candidates");
    }
    for (const auto &d : heads.denominals) {
      for (const auto &c : heads.contexts) pool.push_back({d, c});
    }
  }
  if (pool.empty()) throw ContractError("empty production candidate set");
  auto w = FrameWeights(model, frames);
  std::vector<SpeakerDistribution> per_frame(w.size());
  for (std::size_t e = 0; e < w.size(); ++e) {
    if (w[e] == 0.0) continue;
    per_frame[e] = model.has_frames() ? model.SpeakerLikelihood(interpretation, e)
                                      : model.SpeakerLikelihood(interpretation);
  }
  RankedList<Utterance> out;
  std::set<Utterance> seen;
  for (const auto &u : pool) {
    if (!seen.insert(u).second) continue;
    auto d = model.DenominalIndex(u.denominal);
    auto c = model.ContextIndex(u.context);
    double p = 0.0;
    if (d && c) {
      for (std::size_t e = 0; e < w.size(); ++e) {
        if (w[e] > 0.0) p += w[e] * per_frame[e].denominal[*d] * per_frame[e].context[*c];
      }
    }
    out.push_back({u, p});
  }
  SortRanked(out);
  return out;
}

RankedList<Utterance> Produce(const Model &model, const Interpretation &interpretation,
                              int k, const FrameSampleConfig &frames,
                              const std::vector<Utterance> *candidates) {
  CheckK(k);
  return Truncate(RankUtterances(model, interpretation, frames, candidates), k);
}

RankedList<Utterance> PredictFutureUsage(const Model &model,
                                         const std::vector<Interpretation> &interpretations,
                                         int m, const FrameSampleConfig &frames,
                                         const std::vector<Utterance> *candidates) {
  if (m < 1) throw ContractError("m must be >= 1");
  std::map<Utterance, double> best;
  for (const auto &in : interpretations) {
    for (const auto &s : RankUtterances(model, in, frames, candidates)) {
      auto [it, inserted] = best.emplace(s.item, s.score);
      if (!inserted) it->second = std::max(it->second, s.score);
    }
  }
  RankedList<Utterance> out;
  for (const auto &[u, p] : best) out.push_back({u, p});
  SortRanked(out);
  return Truncate(std::move(out), m);
}

std::string FramePosteriorTable::ToCsv() const {
  std::ostringstream out;
  out.precision(17);
  out << "denominal,context";
  std::size_t k = rows.empty() ? 0 : rows.front().size();
  for (std::size_t e = 0; e < k; ++e) out << ",frame_" << e;
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << utterances[i].denominal << ',' << utterances[i].context;
    for (double p : rows[i]) out << ',' << p;
    out << '\n';
  }
  return out.str();
}

FramePosteriorTable ExportFramePosteriors(const Model &model,
                                          const std::vector<Utterance> &utterances) {
  if (!model.has_frames()) {
    throw ContractError("frame posteriors need the full generative model");
  }
  FramePosteriorTable table;
  table.utterances = utterances;
  for (const auto &u : utterances) table.rows.push_back(model.ListenerPosterior(u).frame);
  return table;
}

}  // namespace noun2verb
