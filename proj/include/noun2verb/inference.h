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

// Comprehension, production, temporal prediction and frame-posterior export.

#ifndef NOUN2VERB_INFERENCE_H_
#define NOUN2VERB_INFERENCE_H_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noun2verb/data.h"
#include "noun2verb/models.h"

namespace noun2verb {

template <typename T>
struct Scored {
  T item;
  double score = 0.0;

  bool operator==(const Scored &) const = default;
};

// Scores descending, ties broken by the item's natural order.
template <typename T>
using RankedList = std::vector<Scored<T>>;

template <typename T>
void SortRanked(RankedList<T> &list) {
  std::stable_sort(list.begin(), list.end(), [](const Scored<T> &a, const Scored<T> &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  });
}

struct FrameSampleConfig {
  enum class Mode { kAuto, kExact, kSampled };
  Mode mode = Mode::kAuto;  // Auto enumerates when K <= 64.
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kExactFrameLimit = 64;
inline constexpr std::size_t kProductionCellCap = 1000000;

// All (V, R) interpretations ranked by p_l(I | U). For the full model the
// frame is marginalized as sum_E p_0(E) p_l(I, E | U), then normalized.
RankedList<Interpretation> RankInterpretations(const Model &model,
                                               const Utterance &utterance,
                                               const FrameSampleConfig &frames = {});
RankedList<Interpretation> Comprehend(const Model &model, const Utterance &utterance,
                                      int k, const FrameSampleConfig &frames = {});

// Utterances ranked by p_s(U | I) = sum_E p_0(E) p_s(U | I, E). Without a
// candidate list the pool is the D x C cross product of the speaker heads.
// Candidates outside the heads score 0.
RankedList<Utterance> RankUtterances(const Model &model,
                                     const Interpretation &interpretation,
                                     const FrameSampleConfig &frames = {},
                                     const std::vector<Utterance> *candidates = nullptr);
RankedList<Utterance> Produce(const Model &model, const Interpretation &interpretation,
                              int k, const FrameSampleConfig &frames = {},
                              const std::vector<Utterance> *candidates = nullptr);

// Union of production rankings over the interpretations, each utterance
// kept once with its best score, truncated to m.
RankedList<Utterance> PredictFutureUsage(const Model &model,
                                         const std::vector<Interpretation> &interpretations,
                                         int m, const FrameSampleConfig &frames = {},
                                         const std::vector<Utterance> *candidates = nullptr);

struct FramePosteriorTable {
  std::vector<Utterance> utterances;
  std::vector<std::vector<double>> rows;  // One length-K vector each.

  std::string ToCsv() const;
};

FramePosteriorTable ExportFramePosteriors(const Model &model,
                                          const std::vector<Utterance> &utterances);

}  // namespace noun2verb

#endif  // NOUN2VERB_INFERENCE_H_
