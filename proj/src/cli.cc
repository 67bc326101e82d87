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

#include "noun2verb/cli.h"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "noun2verb/data.h"
#include "noun2verb/diachronic.h"
#include "noun2verb/errors.h"
#include "noun2verb/evaluation.h"
#include "noun2verb/harvester.h"
#include "noun2verb/inference.h"
#include "noun2verb/lexicon.h"
#include "noun2verb/models.h"
#include "noun2verb/training.h"

namespace noun2verb {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

namespace {

std::string ReadBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

}  // namespace

std::string Sha256File(const std::string &path) { return Sha256Hex(ReadBytes(path)); }

namespace {

// Records what a run read and will write. Saved before any computation
// output and again with the exit code once the run ends.
class RunManifest {
 public:
  RunManifest(std::string subcommand, fs::path out_dir) : out_dir_(std::move(out_dir)) {
    doc_["subcommand"] = std::move(subcommand);
    doc_["artifact_version"] = std::string(kArtifactVersion);
    doc_["config"] = json::object();
    doc_["inputs"] = json::object();
    doc_["outputs"] = json::array();
    doc_["exit_code"] = nullptr;
  }

  json &config() { return doc_["config"]; }
  void SetSeed(std::uint64_t seed) { doc_["seed"] = seed; }
  void Input(const std::string &path) { doc_["inputs"][path] = Sha256File(path); }
  std::string Output(const std::string &name) {
    std::string path = (out_dir_ / name).string();
    doc_["outputs"].push_back(path);
    return path;
  }
  void Save() {
    fs::create_directories(out_dir_);
    WriteText(out_dir_ / "manifest.json", doc_.dump(2) + "\n");
    saved_ = true;
  }
  void Finish(int code) {
    doc_["exit_code"] = code;
    Save();
  }
  bool saved() const { return saved_; }

 private:
  fs::path out_dir_;
  json doc_ = json::object();
  bool saved_ = false;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

// Options that name input files; their contents are digested.
const std::set<std::string> kInputOptions = {
    "corpus", "synonyms", "supervised", "unsupervised", "embeddings", "config",
    "model",  "train",    "lemmas",     "candidates",   "counts"};

void RecordOptions(const CLI::App &sub, RunManifest &manifest) {
  for (const CLI::Option *opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string &name = opt->get_lnames().front();
    if (name == "help") continue;
    std::vector<std::string> values = opt->results();
    if (values.empty()) {
      if (opt->get_default_str().empty()) continue;
      values.push_back(opt->get_default_str());
    }
    manifest.config()[name] = values.size() == 1 ? json(values.front()) : json(values);
    // train --model names a model kind, not a checkpoint.
    const bool is_file =
        kInputOptions.count(name) && !(name == "model" && sub.get_name() == "train");
    if (is_file && opt->count() > 0) {
      for (const auto &v : values) manifest.Input(v);
    }
  }
}

Relation RequireRelation(const std::string &symbol) {
  auto r = ParseRelation(symbol);
  if (!r) throw FormatError("unknown relation '" + symbol + "'");
  return *r;
}

Model LoadModel(const std::string &path) { return Model::FromCheckpoint(ReadCheckpoint(path)); }

// ---------------------------------------------------------------- harvest

struct HarvestArgs {
  std::string corpus, relation, denominal, context, supervised, synonyms;
  std::string language = "english";
  int top = 3;
};

int RunHarvest(const HarvestArgs &a, RunManifest &m, std::ostream &out) {
  const bool single = !a.denominal.empty();
  if (single == !a.supervised.empty()) {
    throw CLI::ValidationError("harvest",
                               "give either --denominal/--context or --supervised");
  }
  if (single && (a.context.empty() || a.relation.empty())) {
    throw CLI::ValidationError("harvest", "--denominal needs --context and --relation");
  }
  if (!a.synonyms.empty() && a.supervised.empty()) {
    throw CLI::ValidationError("harvest", "--synonyms needs --supervised");
  }
  const auto language =
      a.language == "chinese" ? TemplateLanguage::kChinese : TemplateLanguage::kEnglish;
  const std::string harvested = m.Output("harvested.tsv");
  const std::string augmented = a.synonyms.empty() ? "" : m.Output("augmented.tsv");
  m.Save();

  TokenizedCorpus corpus = LoadCorpus(a.corpus);
  Dataset result;
  auto harvest = [&](const Utterance &u, Relation r) {
    auto verbs = HarvestParaphrases(corpus, u, r, a.top, language);
    SupervisedExample ex;
    ex.utterance = u;
    for (const auto &[verb, count] : verbs) ex.gold.push_back({{verb, r}, count});
    return ex;
  };
  if (single) {
    auto ex = harvest({a.denominal, a.context}, RequireRelation(a.relation));
    for (const auto &g : ex.gold) out << g.interpretation.verb << '\t' << g.votes << '\n';
    if (!ex.gold.empty()) result.supervised.push_back(std::move(ex));
  } else {
    Dataset input = LoadDataset(a.supervised);
    for (const auto &record : input.supervised) {
      Relation r = a.relation.empty() ? record.gold.front().interpretation.relation
                                      : RequireRelation(a.relation);
      auto ex = harvest(record.utterance, r);
      ex.source = record.source;
      ex.decade = record.decade;
      out << ToString(record.utterance) << '\t' << ex.gold.size() << " verbs\n";
      if (!ex.gold.empty()) result.supervised.push_back(std::move(ex));
    }
    if (!a.synonyms.empty()) {
      Dataset aug;
      for (auto &u : AugmentWithSynonyms(input.supervised, LoadSynonyms(a.synonyms))) {
        aug.AddUnsupervised(std::move(u));
      }
      WriteText(augmented, SerializeDataset(aug));
    }
  }
  WriteText(harvested, SerializeDataset(result));
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string model, config, supervised, unsupervised, embeddings;
  std::vector<std::string> exclude;
};

// Drops every record of the excluded denominals and removes them from the
// verb candidates; the other heads keep the full vocabulary.
HeadSpec ApplyExclusions(Dataset &data, const std::vector<std::string> &targets,
                         std::size_t frames, std::ostream &err) {
  HeadSpec heads = HeadSpec::FromDataset(data, frames);
  if (targets.empty()) return heads;
  Vocabulary vocab = BuildVocabulary(data);
  ExcludeVerbCandidates(vocab, targets);
  heads.verbs = vocab.TokensWithRole(kVerbCandidate);
  std::set<std::string> drop(targets.begin(), targets.end());
  std::set<std::string> verbs(heads.verbs.begin(), heads.verbs.end());
  Dataset kept;
  std::size_t removed = 0;
  for (auto &ex : data.supervised) {
    bool usable = std::any_of(ex.gold.begin(), ex.gold.end(), [&](const auto &g) {
      return g.votes > 0 && verbs.count(g.interpretation.verb);
    });
    if (drop.count(ex.utterance.denominal) || !usable) {
      ++removed;
      continue;
    }
    kept.supervised.push_back(std::move(ex));
  }
  for (std::size_t i = 0; i < data.unsupervised.size(); ++i) {
    if (drop.count(data.unsupervised[i].denominal)) {
      ++removed;
      continue;
    }
    kept.AddUnsupervised(data.unsupervised[i], i < data.unsupervised_decades.size()
                                                   ? data.unsupervised_decades[i]
                                                   : std::nullopt);
  }
  err << "excluded " << removed << " records\n";
  data = std::move(kept);
  return heads;
}

int RunTrain(const TrainArgs &a, const Globals &g, RunManifest &m, std::ostream &out,
             std::ostream &err) {
  auto kind = ParseModelKind(a.model);
  if (!kind) throw CLI::ValidationError("--model", "expected full, partial or discriminative");
  if (a.supervised.empty() && a.unsupervised.empty()) {
    throw CLI::ValidationError("train", "give --supervised and/or --unsupervised");
  }
  TrainConfig config = LoadTrainConfig(a.config);
  if (g.seed) config.seed = *g.seed;
  if (config.checkpoint_dir.empty()) config.checkpoint_dir = (fs::path(g.out) / "checkpoints").string();
  if (config.log_path.empty()) config.log_path = m.Output("train_log.jsonl");
  config.Validate();
  m.config()["train_config"] = config.ToJson();
  m.SetSeed(config.seed);
  m.Output("checkpoints/final.ckpt");
  m.Save();

  Dataset data;
  if (!a.supervised.empty()) MergeInto(data, LoadDataset(a.supervised));
  if (!a.unsupervised.empty()) MergeInto(data, LoadDataset(a.unsupervised));
  HeadSpec heads = ApplyExclusions(data, a.exclude, config.frames, err);
  if (data.empty()) throw FormatError("no training records left");
  Vocabulary vocab = BuildVocabulary(data);
  for (const auto &t : heads.denominals) vocab.Add(t, kNounCandidate);
  for (const auto &t : heads.verbs) vocab.Add(t, kVerbCandidate);
  EmbeddingTable embeddings = LoadEmbeddings(a.embeddings, &vocab);
  if (*kind == ModelKind::kDiscriminative && data.supervised.empty()) {
    throw FormatError("the discriminative model needs supervised records");
  }
  Model model(*kind, heads, embeddings, ModelConfigFor(config));
  TrainingReport report = Train(model, data, config);
  const EpochRecord &last = report.epochs.back();
  out << "epochs\t" << last.epoch << "\nloss\t" << last.total << "\ncheckpoint\t"
      << report.final_checkpoint << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string model, supervised, train, lemmas, group_by = "none";
  std::string language = "english";
  int k_max = 5;
};

using Comprehender = std::function<RankedList<Interpretation>(const Utterance &)>;
using Producer =
    std::function<RankedList<Utterance>(const Interpretation &, const std::vector<Utterance> &)>;

// Verb marginal of a ranked interpretation list, best first.
RankedList<std::string> VerbMarginal(const RankedList<Interpretation> &ranked) {
  std::map<std::string, double> mass;
  for (const auto &s : ranked) mass[s.item.verb] += s.score;
  double total = 0.0;
  for (const auto &[v, p] : mass) total += p;
  RankedList<std::string> out;
  for (const auto &[v, p] : mass) out.push_back({v, total > 0.0 ? p / total : 0.0});
  SortRanked(out);
  return out;
}

MeanSe KlSummary(const std::vector<double> &values, std::uint64_t seed) {
  if (values.size() >= kDefaultSubsetSize) {
    return SubsetKl(values, kDefaultSubsetSize, kDefaultSubsetCount, seed);
  }
  return MeanAndStandardError(values);
}

struct EvalOutput {
  std::vector<MetricReport> metrics;
  RocCurve comprehension, production;
};

EvalOutput Evaluate(const Dataset &test, const Comprehender &comprehend, const Producer &produce,
                    const LemmaMap &lemmas, const EvalArgs &a, std::uint64_t seed) {
  const std::size_t n = test.supervised.size();
  EvalOutput result;
  std::vector<std::vector<std::string>> predictions;
  std::vector<std::set<std::string>> golds;
  std::vector<double> kl, top1;
  std::vector<std::string> groups;
  for (const auto &ex : test.supervised) {
    auto verbs = VerbMarginal(comprehend(ex.utterance));
    std::vector<std::string> ranked;
    std::map<std::string, double> q;
    for (const auto &s : verbs) {
      ranked.push_back(lemmas.Apply(s.item));
      q[s.item] = s.score;
    }
    std::set<std::string> gold;
    for (const auto &gi : ex.gold) {
      if (gi.votes > 0) gold.insert(lemmas.Apply(gi.interpretation.verb));
    }
    kl.push_back(KlDivergence(EmpiricalDistribution(ex), [&](const std::string &v) {
      auto it = q.find(v);
      return it == q.end() ? 0.0 : it->second;
    }));
    top1.push_back(TopKHit(ranked, gold, 1) ? 1.0 : 0.0);
    predictions.push_back(std::move(ranked));
    golds.push_back(std::move(gold));
    if (a.group_by == "adult_child") {
      groups.emplace_back(SourceName(ex.source));
    } else if (a.group_by == "decade") {
      groups.push_back(ex.decade ? std::to_string(*ex.decade) : "unknown");
    }
  }
  result.comprehension = RocAuc(predictions, golds, a.k_max);
  auto kl_ms = KlSummary(kl, seed);
  auto top1_ms = MeanAndStandardError(top1);
  result.metrics.push_back({"comprehension_kl", kl_ms.mean, kl_ms.standard_error, "", n});
  result.metrics.push_back({"comprehension_top1", top1_ms.mean, top1_ms.standard_error, "", n});
  result.metrics.push_back({"comprehension_auc", result.comprehension.auc, 0.0, "", n});

  // Production: one query per distinct top-voted interpretation, ranked over
  // the distinct test utterances.
  std::vector<Utterance> pool;
  std::map<Interpretation, std::map<std::string, double>> empirical;
  for (const auto &ex : test.supervised) {
    pool.push_back(ex.utterance);
    empirical[ex.RankedGold().front().interpretation][ex.utterance.denominal] += 1.0;
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  predictions.clear();
  golds.clear();
  std::vector<double> pkl, ptop1;
  for (const auto &[query, counts] : empirical) {
    auto ranked = produce(query, pool);
    std::map<std::string, double> q;
    double total = 0.0;
    std::vector<std::string> order;
    for (const auto &s : ranked) {
      if (!q.count(s.item.denominal)) order.push_back(s.item.denominal);
      q[s.item.denominal] += s.score;
      total += s.score;
    }
    for (auto &[d, p] : q) p = total > 0.0 ? p / total : 0.0;
    AnnotationDistribution p;
    double mass = 0.0;
    for (const auto &[d, c] : counts) mass += c;
    std::set<std::string> gold;
    for (const auto &[d, c] : counts) {
      p.support.push_back(d);
      p.probabilities.push_back(c / mass);
      gold.insert(d);
    }
    pkl.push_back(KlDivergence(p, [&](const std::string &d) {
      auto it = q.find(d);
      return it == q.end() ? 0.0 : it->second;
    }));
    ptop1.push_back(TopKHit(order, gold, 1) ? 1.0 : 0.0);
    predictions.push_back(std::move(order));
    golds.push_back(std::move(gold));
  }
  result.production = RocAuc(predictions, golds, a.k_max);
  const std::size_t nq = empirical.size();
  auto pkl_ms = KlSummary(pkl, seed);
  auto ptop1_ms = MeanAndStandardError(ptop1);
  result.metrics.push_back({"production_kl", pkl_ms.mean, pkl_ms.standard_error, "", nq});
  result.metrics.push_back({"production_top1", ptop1_ms.mean, ptop1_ms.standard_error, "", nq});
  result.metrics.push_back({"production_auc", result.production.auc, 0.0, "", nq});

  if (!groups.empty()) {
    for (auto &r : GroupedReport("comprehension_kl", kl, groups)) result.metrics.push_back(r);
    for (auto &r : GroupedReport("comprehension_top1", top1, groups)) result.metrics.push_back(r);
  }
  return result;
}

int RunEval(const EvalArgs &a, const Globals &g, RunManifest &m, std::ostream &out) {
  if (a.group_by != "none" && a.group_by != "adult_child" && a.group_by != "decade") {
    throw CLI::ValidationError("--group-by", "expected adult_child or decade");
  }
  if (a.language.empty() || a.language.find('_') != std::string::npos) {
    throw CLI::ValidationError("--language", "must be non-empty without underscores");
  }
  const std::uint64_t seed = g.seed.value_or(0);
  m.SetSeed(seed);
  Model model = LoadModel(a.model);
  const std::string kind(ModelKindName(model.kind()));
  struct Files {
    std::string metrics, roc_comprehension, roc_production;
  };
  auto files = [&](const std::string &name) {
    std::string stem = name + "_" + a.language;
    return Files{m.Output("metrics_" + stem + ".csv"),
                 m.Output("roc_" + stem + "_comprehension.csv"),
                 m.Output("roc_" + stem + "_production.csv")};
  };
  Files model_files = files(kind);
  std::optional<Files> baseline_files;
  if (!a.train.empty()) baseline_files = files("frequency");
  m.Save();

  Dataset test = LoadDataset(a.supervised);
  if (test.supervised.empty()) throw FormatError("evaluation needs supervised test records");
  LemmaMap lemmas = a.lemmas.empty() ? LemmaMap() : LemmaMap::Load(a.lemmas);
  FrameSampleConfig frames;
  frames.seed = seed;

  auto write = [&](const Files &f, const EvalOutput &r, const std::string &name) {
    WriteText(f.metrics, MetricReportsToCsv(r.metrics));
    WriteText(f.roc_comprehension, r.comprehension.ToCsv());
    WriteText(f.roc_production, r.production.ToCsv());
    for (const auto &x : r.metrics) {
      if (x.group.empty()) out << name << '\t' << x.metric << '\t' << x.value << '\n';
    }
  };
  auto result = Evaluate(
      test, [&](const Utterance &u) { return RankInterpretations(model, u, frames); },
      [&](const Interpretation &i, const std::vector<Utterance> &pool) {
        return RankUtterances(model, i, frames, &pool);
      },
      lemmas, a, seed);
  write(model_files, result, kind);
  if (baseline_files) {
    Dataset train = LoadDataset(a.train);
    FrequencyBaseline baseline(train);
    const auto &heads = model.heads();
    auto base = Evaluate(
        test, [&](const Utterance &) { return baseline.Comprehend(heads.verbs, heads.relations); },
        [&](const Interpretation &, const std::vector<Utterance> &pool) {
          return baseline.Produce(pool);
        },
        lemmas, a, seed);
    write(*baseline_files, base, "frequency");
  }
  return kExitOk;
}

// ---------------------------------------------------------------- comprehend / produce

struct ComprehendArgs {
  std::string model, verb, context;
  int top = 3;
};

int RunComprehend(const ComprehendArgs &a, const Globals &g, RunManifest &m, std::ostream &out) {
  FrameSampleConfig frames;
  frames.seed = g.seed.value_or(0);
  m.SetSeed(frames.seed);
  m.Save();
  Model model = LoadModel(a.model);
  for (const auto &s : Comprehend(model, {a.verb, a.context}, a.top, frames)) {
    out << s.item.verb << '\t' << RelationSymbol(s.item.relation) << '\t' << s.score << '\n';
  }
  return kExitOk;
}

struct ProduceArgs {
  std::string model, verb, relation, candidates;
  int top = 5;
};

int RunProduce(const ProduceArgs &a, const Globals &g, RunManifest &m, std::ostream &out) {
  FrameSampleConfig frames;
  frames.seed = g.seed.value_or(0);
  m.SetSeed(frames.seed);
  m.Save();
  Model model = LoadModel(a.model);
  Interpretation query{a.verb, RequireRelation(a.relation)};
  std::optional<std::vector<Utterance>> pool;
  if (!a.candidates.empty()) {
    Dataset d = LoadDataset(a.candidates);
    pool.emplace(d.unsupervised);
    for (const auto &ex : d.supervised) pool->push_back(ex.utterance);
  }
  for (const auto &s : Produce(model, query, a.top, frames, pool ? &*pool : nullptr)) {
    out << s.item.denominal << '\t' << s.item.context << '\t' << s.score << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- changepoint

struct ChangePointArgs {
  std::string counts, frequency_mode = "total";
  double alpha = 0.05;
  int permutations = 1000;
  std::size_t min_segment = 5;
  long long threshold = kDefaultFrequencyThreshold;
};

int RunChangePoint(const ChangePointArgs &a, const Globals &g, RunManifest &m, std::ostream &out) {
  if (a.frequency_mode != "total" && a.frequency_mode != "per-year") {
    throw CLI::ValidationError("--frequency-mode", "expected total or per-year");
  }
  ChangePointConfig config;
  config.alpha = a.alpha;
  config.permutations = a.permutations;
  config.min_segment = a.min_segment;
  config.seed = g.seed.value_or(0);
  m.SetSeed(config.seed);
  const std::string points_path = m.Output("changepoints.csv");
  const std::string z_path = m.Output("zseries.csv");
  m.Save();
  auto series = FrequencyFilter(LoadCounts(a.counts), a.threshold,
                                a.frequency_mode == "total" ? FrequencyMode::kTotal
                                                            : FrequencyMode::kPerYear);
  std::vector<ChangePoint> points;
  for (const auto &s : series) {
    if (auto cp = DetectChangePoint(s, config)) {
      out << cp->word << '\t' << cp->year << '\t' << cp->p_value << '\n';
      points.push_back(*cp);
    }
  }
  WriteText(points_path, ChangePointsToCsv(points));
  WriteText(z_path, ZSeriesToCsv(series));
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct Row {
  std::string model, language, task, metric;
  double value = 0.0, standard_error = 0.0;
  std::size_t sample_size = 0;
};

int ModelRank(const std::string &model) {
  static const std::vector<std::string> order = {"full", "partial", "discriminative", "frequency"};
  auto it = std::find(order.begin(), order.end(), model);
  return static_cast<int>(it - order.begin());
}

std::vector<Row> ParseMetricsFile(const fs::path &path) {
  // metrics_<model>_<language>.csv
  std::string stem = path.stem().string().substr(std::string("metrics_").size());
  auto cut = stem.find('_');
  if (cut == std::string::npos || cut == 0 || cut + 1 == stem.size()) {
    throw FormatError("cannot read model and language from '" + path.filename().string() + "'");
  }
  std::string model = stem.substr(0, cut), language = stem.substr(cut + 1);
  std::istringstream lines(ReadBytes(path.string()));
  std::string line;
  std::vector<Row> rows;
  int n = 0;
  while (std::getline(lines, line)) {
    if (++n == 1) continue;  // Header.
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream fields(line);
    for (std::string x; std::getline(fields, x, ',');) f.push_back(x);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 5) throw FormatError(path.string() + ": expected 5 fields", n);
    if (!f[1].empty()) continue;  // Grouped breakdowns stay in the eval output.
    auto under = f[0].find('_');
    if (under == std::string::npos) throw FormatError(path.string() + ": bad metric name", n);
    try {
      rows.push_back({model, language, f[0].substr(0, under), f[0].substr(under + 1),
                      std::stod(f[2]), std::stod(f[3]), std::stoul(f[4])});
    } catch (const std::logic_error &) {
      throw FormatError(path.string() + ": bad number", n);
    }
  }
  return rows;
}

struct ReportArgs {
  std::string in;
};

int RunReport(const ReportArgs &a, RunManifest &m, std::ostream &out) {
  if (!fs::is_directory(a.in)) throw FormatError("'" + a.in + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(a.in)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("metrics_") && name.ends_with(".csv")) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw FormatError("no metrics_*.csv files in '" + a.in + "'");
  std::sort(files.begin(), files.end());
  for (const auto &f : files) m.Input(f.string());
  const std::string csv_path = m.Output("report.csv");
  const std::string json_path = m.Output("report.json");
  m.Save();

  std::vector<Row> rows;
  for (const auto &f : files) {
    for (auto &r : ParseMetricsFile(f)) rows.push_back(std::move(r));
  }
  std::sort(rows.begin(), rows.end(), [](const Row &x, const Row &y) {
    return std::tuple(x.language, ModelRank(x.model), x.model, x.task, x.metric) <
           std::tuple(y.language, ModelRank(y.model), y.model, y.task, y.metric);
  });
  // The KL table has one row per (model, language, task); the JSON also
  // carries top-1 accuracy and AUC.
  std::ostringstream csv;
  csv.precision(10);
  csv << "model,language,task,kl,standard_error,sample_size\n";
  json doc = {{"kl", json::array()}, {"top1", json::array()}, {"auc", json::array()}};
  for (const auto &r : rows) {
    if (r.metric == "kl") {
      csv << r.model << ',' << r.language << ',' << r.task << ',' << r.value << ','
          << r.standard_error << ',' << r.sample_size << '\n';
    }
    if (doc.contains(r.metric)) {
      doc[r.metric].push_back({{"model", r.model},
                               {"language", r.language},
                               {"task", r.task},
                               {"value", r.value},
                               {"standard_error", r.standard_error},
                               {"sample_size", r.sample_size}});
    }
  }
  WriteText(csv_path, csv.str());
  WriteText(json_path, doc.dump(2) + "\n");
  out << csv.str();
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"noun2verb: speaker-listener models of noun-to-verb conversion", "noun2verb"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every stochastic step");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  HarvestArgs harvest;
  auto *h = app.add_subcommand("harvest", "Mine paraphrase verbs from a tagged corpus");
  h->add_option("--corpus", harvest.corpus, "Tagged corpus, one sentence per line")->required();
  h->add_option("--relation", harvest.relation, "Relation symbol, e.g. LOCATION_IN");
  h->add_option("--denominal", harvest.denominal, "Denominal of a single utterance");
  h->add_option("--context", harvest.context, "Context of a single utterance");
  h->add_option("--supervised", harvest.supervised, "Records whose utterances to harvest");
  h->add_option("--synonyms", harvest.synonyms, "Synonym lexicon for augmentation");
  h->add_option("--top", harvest.top, "Verbs kept per utterance")->capture_default_str();
  h->add_option("--language", harvest.language, "english or chinese")
      ->check(CLI::IsMember({"english", "chinese"}))
      ->capture_default_str();

  TrainArgs train;
  auto *t = app.add_subcommand("train", "Train a model and write checkpoints");
  t->add_option("--model", train.model, "full, partial or discriminative")->required();
  t->add_option("--config", train.config, "key = value training config")->required();
  t->add_option("--supervised", train.supervised, "Supervised records");
  t->add_option("--unsupervised", train.unsupervised, "Unsupervised records");
  t->add_option("--embeddings", train.embeddings, "Text-format word embeddings")->required();
  t->add_option("--exclude-target", train.exclude, "Denominal withheld from training");

  EvalArgs eval;
  auto *e = app.add_subcommand("eval", "Score a checkpoint on held-out records");
  e->add_option("--model", eval.model, "Checkpoint")->required();
  e->add_option("--supervised", eval.supervised, "Held-out supervised records")->required();
  e->add_option("--train", eval.train, "Training records for the frequency baseline");
  e->add_option("--lemmas", eval.lemmas, "form<TAB>lemma map for gold matching");
  e->add_option("--language", eval.language, "Language tag for the report")->capture_default_str();
  e->add_option("--group-by", eval.group_by, "adult_child or decade")->capture_default_str();
  e->add_option("--k-max", eval.k_max, "Largest k on the ROC curve")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ComprehendArgs comp;
  auto *c = app.add_subcommand("comprehend", "Rank interpretations of a denominal utterance");
  c->add_option("--model", comp.model, "Checkpoint")->required();
  c->add_option("--verb", comp.verb, "The denominal verb, e.g. porch")->required();
  c->add_option("--context", comp.context, "Its object, e.g. newspaper")->required();
  c->add_option("--top", comp.top, "Interpretations printed")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ProduceArgs prod;
  auto *p = app.add_subcommand("produce", "Rank utterances for an interpretation");
  p->add_option("--model", prod.model, "Checkpoint")->required();
  p->add_option("--verb", prod.verb, "Paraphrase verb, e.g. send")->required();
  p->add_option("--relation", prod.relation, "Relation symbol")->required();
  p->add_option("--candidates", prod.candidates, "Records whose utterances form the pool");
  p->add_option("--top", prod.top, "Utterances printed")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ChangePointArgs cp;
  auto *d = app.add_subcommand("changepoint", "Detect noun-to-verb change points");
  d->add_option("--counts", cp.counts, "CSV word,year,noun_count,verb_count")->required();
  d->add_option("--alpha", cp.alpha, "Significance level")->capture_default_str();
  d->add_option("--permutations", cp.permutations, "Permutation count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  d->add_option("--min-segment", cp.min_segment, "Shortest segment")->capture_default_str();
  d->add_option("--threshold", cp.threshold, "Frequency filter threshold")->capture_default_str();
  d->add_option("--frequency-mode", cp.frequency_mode, "total or per-year")->capture_default_str();

  ReportArgs rep;
  auto *r = app.add_subcommand("report", "Consolidate eval metric files into summary tables");
  r->add_option("--in", rep.in, "Directory of metrics_*.csv files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &ex) {
    err << "error: " << ex.what() << "\n\n";
    const CLI::App *sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  CLI::App *sub = app.get_subcommands().front();
  RunManifest manifest(sub->get_name(), g.out);
  if (g.seed) manifest.SetSeed(*g.seed);
  int code = kExitOk;
  try {
    RecordOptions(*sub, manifest);
    const std::string name = sub->get_name();
    if (name == "harvest") code = RunHarvest(harvest, manifest, out);
    else if (name == "train") code = RunTrain(train, g, manifest, out, err);
    else if (name == "eval") code = RunEval(eval, g, manifest, out);
    else if (name == "comprehend") code = RunComprehend(comp, g, manifest, out);
    else if (name == "produce") code = RunProduce(prod, g, manifest, out);
    else if (name == "changepoint") code = RunChangePoint(cp, g, manifest, out);
    else code = RunReport(rep, manifest, out);
  } catch (const CLI::ValidationError &ex) {
    err << "error: " << ex.what() << "\n\n" << sub->help();
    return kExitUsage;
  } catch (const NumericalError &ex) {
    err << "numerical error: " << ex.what() << '\n';
    code = kExitNumerical;
  } catch (const FormatError &ex) {
    err << "data error: " << ex.what() << '\n';
    code = kExitData;
  } catch (const ContractError &ex) {
    err << "data error: " << ex.what() << '\n';
    code = kExitData;
  } catch (const std::exception &ex) {
    err << "error: " << ex.what() << '\n';
    code = kExitData;
  }
  // The manifest is guaranteed on success and numerical aborts; data errors
  // leave one only when the run got far enough to start it.
  try {
    if (code != kExitData || manifest.saved()) manifest.Finish(code);
  } catch (const std::exception &ex) {
    err << "cannot write manifest: " << ex.what() << '\n';
    if (code == kExitOk) code = kExitData;
  }
  return code;
}

}  // namespace noun2verb
