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

#include "noun2verb/evaluation.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "noun2verb/errors.h"

namespace noun2verb {

MeanSe MeanAndStandardError(std::span<const double> values) {
  if (values.empty()) throw ContractError("mean of an empty sample");
  MeanSe out;
  out.n = values.size();
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(out.n);
  if (out.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.standard_error = std::sqrt(ss / static_cast<double>(out.n - 1)) /
                         std::sqrt(static_cast<double>(out.n));
  }
  return out;
}

std::string MetricReportsToCsv(const std::vector<MetricReport> &reports) {
  std::ostringstream out;
  out.precision(10);
  out << "metric,group,value,standard_error,sample_size\n";
  for (const auto &r : reports) {
    out << r.metric << ',' << r.group << ',' << r.value << ',' << r.standard_error << ','
        << r.sample_size << '\n';
  }
  return out.str();
}

LemmaMap LemmaMap::Parse(const std::string &text) {
  std::map<std::string, std::string> forms;
  std::istringstream lines(text);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw FormatError("expected form<TAB>lemma", n);
    }
    forms.emplace(CaseFold(line.substr(0, tab)), CaseFold(line.substr(tab + 1)));
  }
  return LemmaMap(std::move(forms));
}

LemmaMap LemmaMap::Load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open lemma map '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

std::string LemmaMap::Apply(const std::string &token) const {
  auto it = forms_.find(token);
  return it == forms_.end() ? token : it->second;
}

bool TopKHit(std::span<const std::string> ranked, const std::set<std::string> &gold, int k) {
  if (k < 1) throw ContractError("k must be >= 1");
  if (gold.empty()) throw ContractError("gold set is empty");
  std::size_t n = std::min(ranked.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    if (gold.count(ranked[i])) return true;
  }
  return false;
}

MeanSe TopKAccuracy(const std::vector<std::vector<std::string>> &predictions,
                    const std::vector<std::set<std::string>> &golds, int k) {
  if (predictions.size() != golds.size()) {
    throw ContractError("predictions and golds differ in length");
  }
  std::vector<double> hits;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    hits.push_back(TopKHit(predictions[i], golds[i], k) ? 1.0 : 0.0);
  }
  return MeanAndStandardError(hits);
}

std::string RocCurve::ToCsv() const {
  std::ostringstream out;
  out.precision(10);
  out << "k,accuracy\n";
  for (std::size_t k = 0; k < accuracy.size(); ++k) out << k + 1 << ',' << accuracy[k] << '\n';
  return out.str();
}

RocCurve RocAuc(const std::vector<std::vector<std::string>> &predictions,
                const std::vector<std::set<std::string>> &golds, int k_max) {
  if (k_max < 1) throw ContractError("k_max must be >= 1");
  RocCurve curve;
  for (int k = 1; k <= k_max; ++k) curve.accuracy.push_back(TopKAccuracy(predictions, golds, k).mean);
  if (k_max == 1) {
    curve.auc = curve.accuracy[0];
  } else {
    double area = 0.0;
    for (int k = 1; k < k_max; ++k) area += 0.5 * (curve.accuracy[k - 1] + curve.accuracy[k]);
    curve.auc = area / static_cast<double>(k_max - 1);
  }
  return curve;
}

double KlDivergence(std::span<const double> p, std::span<const double> q,
                    const KlOptions &options) {
  if (p.size() != q.size()) throw ContractError("P and Q differ in length");
  if (!(options.epsilon >= 0.0)) throw ContractError("epsilon must be >= 0");
  std::vector<double> qs(q.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0)) throw ContractError("P has a negative entry");
    if (!(q[i] >= 0.0)) throw ContractError("Q has a negative entry");
    if (p[i] > 0.0) {
      qs[i] = std::max(q[i], options.epsilon);
      z += qs[i];
    }
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    double qi = options.renormalize ? qs[i] / z : qs[i];
    if (qi == 0.0) return INFINITY;
    kl += p[i] * std::log(p[i] / qi);
  }
  return kl;
}

double KlDivergence(const AnnotationDistribution &p,
                    const std::function<double(const std::string &)> &q,
                    const KlOptions &options) {
  p.Validate();
  std::vector<double> qv;
  for (const auto &item : p.support) qv.push_back(q(item));
  return KlDivergence(p.probabilities, qv, options);
}

MeanSe SubsetKl(std::span<const double> per_example_kl, std::size_t subset_size,
                std::size_t n_subsets, std::uint64_t seed) {
  if (subset_size < 1 || subset_size > per_example_kl.size()) {
    throw ContractError("subset size must be in [1, " +
                        std::to_string(per_example_kl.size()) + "]");
  }
  if (n_subsets < 1) throw ContractError("need at least one subset");
  Rng rng(seed);
  std::vector<std::size_t> order(per_example_kl.size());
  std::vector<double> means;
  for (std::size_t s = 0; s < n_subsets; ++s) {
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(order);
    double total = 0.0;
    for (std::size_t i = 0; i < subset_size; ++i) total += per_example_kl[order[i]];
    means.push_back(total / static_cast<double>(subset_size));
  }
  return MeanAndStandardError(means);
}

namespace {

template <typename Map>
void Normalize(Map &counts) {
  double total = 0.0;
  for (const auto &[k, v] : counts) total += v;
  if (total > 0.0) {
    for (auto &[k, v] : counts) v /= total;
  }
}

template <typename Map, typename Key>
double Get(const Map &map, const Key &key) {
  auto it = map.find(key);
  return it == map.end() ? 0.0 : it->second;
}

}  // namespace

FrequencyBaseline::FrequencyBaseline(const Dataset &train) {
  if (train.empty()) throw ContractError("frequency baseline needs training data");
  for (const auto &ex : train.supervised) {
    denominal_[ex.utterance.denominal] += 1.0;
    context_[ex.utterance.context] += 1.0;
    for (const auto &g : ex.gold) {
      verb_[g.interpretation.verb] += g.votes;
      relation_[g.interpretation.relation] += g.votes;
    }
  }
  for (const auto &u : train.unsupervised) {
    denominal_[u.denominal] += 1.0;
    context_[u.context] += 1.0;
  }
  Normalize(verb_);
  Normalize(relation_);
  Normalize(denominal_);
  Normalize(context_);
}

double FrequencyBaseline::VerbProbability(const std::string &verb) const { return Get(verb_, verb); }
double FrequencyBaseline::RelationProbability(Relation r) const { return Get(relation_, r); }
double FrequencyBaseline::DenominalProbability(const std::string &t) const { return Get(denominal_, t); }
double FrequencyBaseline::ContextProbability(const std::string &t) const { return Get(context_, t); }

RankedList<Interpretation> FrequencyBaseline::Comprehend(
    const std::vector<std::string> &verbs, const std::vector<Relation> &relations) const {
  RankedList<Interpretation> out;
  for (const auto &v : verbs) {
    for (Relation r : relations) out.push_back({{v, r}, VerbProbability(v) * RelationProbability(r)});
  }
  SortRanked(out);
  return out;
}

RankedList<Utterance> FrequencyBaseline::Produce(const std::vector<Utterance> &candidates) const {
  if (candidates.empty()) throw ContractError("empty production candidate set");
  RankedList<Utterance> out;
  for (const auto &u : candidates) {
    out.push_back({u, DenominalProbability(u.denominal) * ContextProbability(u.context)});
  }
  SortRanked(out);
  return out;
}

std::map<int, MeanSe> DecadePrecision(const std::vector<WordPredictions> &words,
                                      DecadeCriterion criterion, int last_decade) {
  std::map<int, std::vector<double>> per_decade;
  for (const auto &w : words) {
    std::set<Utterance> gold;
    for (const auto &g : w.gold) {
      if (!g.decade) {
        throw ContractError("gold usage '" + ToString(g.utterance) + "' of '" + w.word +
                            "' has no decade stamp");
      }
      bool keep = criterion == DecadeCriterion::kNextDecade ? *g.decade == w.change_decade
                                                             : *g.decade >= w.change_decade;
      if (keep) gold.insert(g.utterance);
    }
    if (w.change_decade > last_decade || w.predictions.empty()) continue;
    double hits = 0.0;
    for (const auto &p : w.predictions) hits += gold.count(p) ? 1.0 : 0.0;
    per_decade[w.change_decade].push_back(hits / static_cast<double>(w.predictions.size()));
  }
  std::map<int, MeanSe> out;
  for (const auto &[decade, values] : per_decade) out[decade] = MeanAndStandardError(values);
  return out;
}

std::vector<MetricReport> GroupedReport(const std::string &metric,
                                        std::span<const double> values,
                                        std::span<const std::string> groups) {
  if (values.size() != groups.size()) throw ContractError("values and groups differ in length");
  std::map<std::string, std::vector<double>> by_group;
  for (std::size_t i = 0; i < values.size(); ++i) by_group[groups[i]].push_back(values[i]);
  std::vector<MetricReport> out;
  for (const auto &[group, v] : by_group) {
    auto ms = MeanAndStandardError(v);
    out.push_back({metric, ms.mean, ms.standard_error, group, ms.n});
  }
  return out;
}

}  // namespace noun2verb
