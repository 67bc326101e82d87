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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "noun2verb/cli.h"
#include "noun2verb/random.h"

namespace fs = std::filesystem;
using noun2verb::RunCli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "noun2verb");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void Spit(const fs::path &p, const std::string &text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::size_t Lines(const std::string &text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// A scratch directory with a small corpus of records and embeddings.
struct Workspace {
  fs::path root;

  explicit Workspace(const std::string &name)
      : root(fs::temp_directory_path() / ("noun2verb_cli_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
    Spit(root / "train.tsv",
         "porch\tnewspaper\tLOCATION_IN\tdrop:8,leave:5,throw:2\n"
         "carpet\tfloor\tLOCATUM_ON\tput:6,lay:2\n"
         "bottle\twine\tLOCATION_IN\tput:5,pour:3\n"
         "butter\ttoast\tLOCATUM_ON\tspread:7,put:1\n"
         "porch\tmail\tLOCATION_IN\tdrop:4,leave:4\n"
         "paint\twall\tLOCATUM_ON\tcover:3,put:2\n");
    Spit(root / "unsup.tsv", "bottle\tmilk\ncarpet\tstairs\nbutter\tbread\n");
    Spit(root / "test.tsv",
         "porch\tpaper\tLOCATION_IN\tdrop:3,leave:1\n"
         "paint\tdoor\tLOCATUM_ON\tcover:2,put:2\n");
    std::vector<std::string> tokens = {"porch", "newspaper", "carpet", "floor", "bottle", "wine",
                                       "butter", "toast", "mail", "paint", "wall", "milk",
                                       "stairs", "bread", "paper", "door", "drop", "leave",
                                       "throw", "put", "lay", "pour", "spread", "cover"};
    noun2verb::Rng rng(5);
    std::ostringstream emb;
    for (const auto &t : tokens) {
      emb << t;
      for (int i = 0; i < 4; ++i) emb << ' ' << rng.Normal();
      emb << '\n';
    }
    Spit(root / "emb.txt", emb.str());
    Spit(root / "train.cfg",
         "seed = 3\nepochs = 3\nhidden = 8\nframes = 2\nsupervised_batch = 4\n"
         "unsupervised_batch = 4\n");
  }
  ~Workspace() { fs::remove_all(root); }

  std::string operator/(const std::string &name) const { return (root / name).string(); }
};

}  // namespace

TEST_CASE("sha256 matches the standard test vector") {
  CHECK(noun2verb::Sha256Hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(noun2verb::Sha256Hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("usage errors exit 1 with usage text") {
  auto none = Cli({});
  CHECK(none.code == 1);
  CHECK(none.err.find("Usage") != std::string::npos);
  auto unknown = Cli({"frobnicate"});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  auto missing = Cli({"comprehend", "--verb", "porch", "--context", "newspaper"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("--model") != std::string::npos);
  CHECK(Cli({"--help"}).code == 0);
}

TEST_CASE("train then query a checkpoint") {
  Workspace w("train");
  const std::string out = w / "run";
  auto trained = Cli({"--out", out, "train", "--model", "full", "--config", w / "train.cfg",
                      "--supervised", w / "train.tsv", "--unsupervised", w / "unsup.tsv",
                      "--embeddings", w / "emb.txt"});
  REQUIRE_MESSAGE(trained.code == 0, trained.err);
  const std::string ckpt = out + "/checkpoints/final.ckpt";
  REQUIRE(fs::exists(ckpt));
  CHECK(Lines(Slurp(out + "/train_log.jsonl")) == 3);

  auto manifest = nlohmann::json::parse(Slurp(out + "/manifest.json"));
  CHECK(manifest["subcommand"] == "train");
  CHECK(manifest["exit_code"] == 0);
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["inputs"][w / "train.tsv"] == noun2verb::Sha256File(w / "train.tsv"));
  CHECK(manifest["config"]["train_config"]["epochs"] == 3);

  auto comp = Cli({"--out", w / "q", "comprehend", "--model", ckpt, "--verb", "porch",
                   "--context", "newspaper", "--top", "3"});
  REQUIRE_MESSAGE(comp.code == 0, comp.err);
  CHECK(Lines(comp.out) == 3);
  CHECK(std::count(comp.out.begin(), comp.out.end(), '\t') == 6);
  CHECK(fs::exists(w / "q/manifest.json"));

  auto prod = Cli({"--out", w / "q", "produce", "--model", ckpt, "--verb", "put",
                   "--relation", "LOCATUM_ON", "--top", "2"});
  REQUIRE_MESSAGE(prod.code == 0, prod.err);
  CHECK(Lines(prod.out) == 2);
  auto pooled = Cli({"--out", w / "q", "produce", "--model", ckpt, "--verb", "put",
                     "--relation", "LOCATUM_ON", "--top", "5", "--candidates", w / "unsup.tsv"});
  REQUIRE_MESSAGE(pooled.code == 0, pooled.err);
  CHECK(Lines(pooled.out) == 3);

  auto bad_relation = Cli({"--out", w / "q", "produce", "--model", ckpt, "--verb", "put",
                           "--relation", "SIDEWAYS"});
  CHECK(bad_relation.code == 2);

  const std::string evals = w / "evals";
  auto ev = Cli({"--out", evals, "eval", "--model", ckpt, "--supervised", w / "test.tsv",
                 "--train", w / "train.tsv", "--group-by", "adult_child"});
  REQUIRE_MESSAGE(ev.code == 0, ev.err);
  for (const char *f : {"metrics_full_english.csv", "metrics_frequency_english.csv",
                        "roc_full_english_comprehension.csv", "roc_full_english_production.csv"}) {
    CHECK_MESSAGE(fs::exists(fs::path(evals) / f), f);
  }
  std::string metrics = Slurp(fs::path(evals) / "metrics_full_english.csv");
  CHECK(metrics.find("comprehension_kl,corpus,") != std::string::npos);
  // Header plus five k values.
  CHECK(Lines(Slurp(fs::path(evals) / "roc_full_english_comprehension.csv")) == 6);

  fs::remove(fs::path(evals) / "manifest.json");
  auto rep = Cli({"--out", w / "report", "report", "--in", evals});
  REQUIRE_MESSAGE(rep.code == 0, rep.err);
  // Two models by two tasks plus the header.
  CHECK(Lines(rep.out) == 5);
  std::string first = Slurp(w / "report/report.csv");
  REQUIRE(Cli({"--out", w / "report", "report", "--in", evals}).code == 0);
  CHECK(Slurp(w / "report/report.csv") == first);
}

TEST_CASE("excluded targets leave training and the verb candidates") {
  Workspace w("exclude");
  auto r = Cli({"--out", w / "run", "--seed", "11", "train", "--model", "partial", "--config",
                w / "train.cfg", "--supervised", w / "train.tsv", "--embeddings", w / "emb.txt",
                "--exclude-target", "porch"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.err.find("excluded 2 records") != std::string::npos);
  auto manifest = nlohmann::json::parse(Slurp(w / "run/manifest.json"));
  CHECK(manifest["seed"] == 11);
}

TEST_CASE("data errors exit 2 with the line number") {
  Workspace w("data");
  Spit(w / "bad.tsv", "porch\tnewspaper\tLOCATION_IN\tdrop:8\ncarpet\tfloor\tSIDEWAYS\tput:1\n");
  auto r = Cli({"--out", w / "run", "train", "--model", "full", "--config", w / "train.cfg",
                "--supervised", w / "bad.tsv", "--embeddings", w / "emb.txt"});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
  auto missing = Cli({"--out", w / "run", "train", "--model", "full", "--config",
                      w / "train.cfg", "--supervised", w / "absent.tsv", "--embeddings",
                      w / "emb.txt"});
  CHECK(missing.code == 2);
}

TEST_CASE("numerical aborts exit 3 and still leave a manifest") {
  Workspace w("numeric");
  std::ostringstream emb;
  for (const char *t : {"porch", "newspaper", "carpet", "floor", "bottle", "wine", "butter",
                        "toast", "mail", "paint", "wall", "drop", "leave", "throw", "put",
                        "lay", "pour", "spread", "cover"}) {
    emb << t << " 1e308 -1e308 1e308 -1e308\n";
  }
  Spit(w / "huge.txt", emb.str());
  auto r = Cli({"--out", w / "run", "train", "--model", "full", "--config", w / "train.cfg",
                "--supervised", w / "train.tsv", "--embeddings", w / "huge.txt"});
  CHECK(r.code == 3);
  auto manifest = nlohmann::json::parse(Slurp(w / "run/manifest.json"));
  CHECK(manifest["exit_code"] == 3);
}

TEST_CASE("report tables") {
  Workspace w("report");
  fs::create_directories(w / "empty");
  CHECK(Cli({"--out", w / "r0", "report", "--in", w / "empty"}).code == 2);

  fs::create_directories(w / "m");
  for (const char *model : {"full", "partial", "discriminative"}) {
    Spit(fs::path(w / "m") / (std::string("metrics_") + model + "_english.csv"),
         "metric,group,value,standard_error,sample_size\n"
         "comprehension_kl,,0.5,0.1,10\ncomprehension_top1,,0.4,0.05,10\n"
         "comprehension_kl,adult,0.4,0.1,6\nproduction_kl,,0.7,0.2,4\n");
  }
  auto r = Cli({"--out", w / "r1", "report", "--in", w / "m"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(Lines(Slurp(w / "r1/report.csv")) == 7);
  CHECK(r.out.find("model,language,task,kl,standard_error,sample_size\n"
                   "full,english,comprehension,0.5,0.1,10\n") == 0);
  auto doc = nlohmann::json::parse(Slurp(w / "r1/report.json"));
  CHECK(doc["top1"].size() == 3);
}

TEST_CASE("harvest and changepoint subcommands") {
  Workspace w("misc");
  Spit(w / "corpus.txt",
       "put/VERB the/DET carpet/NOUN on/ADP the/DET floor/NOUN\n"
       "put/VERB the/DET carpet/NOUN on/ADP the/DET floor/NOUN\n"
       "lay/VERB the/DET carpet/NOUN on/ADP the/DET floor/NOUN\n");
  auto h = Cli({"--out", w / "h", "harvest", "--corpus", w / "corpus.txt", "--relation",
                "LOCATUM_ON", "--denominal", "carpet", "--context", "floor", "--top", "3"});
  REQUIRE_MESSAGE(h.code == 0, h.err);
  CHECK(h.out == "put\t2\nlay\t1\n");
  CHECK(Slurp(w / "h/harvested.tsv") == "carpet\tfloor\tLOCATUM_ON\tput:2,lay:1\n");

  std::ostringstream counts;
  counts << "word,year,noun_count,verb_count\n";
  for (int i = 0; i < 40; ++i) {
    counts << "phone," << 1900 + i << ',' << (i < 20 ? 900 : 300) << ',' << (i < 20 ? 100 : 700)
           << '\n';
  }
  Spit(w / "counts.csv", counts.str());
  auto c = Cli({"--out", w / "c", "--seed", "1", "changepoint", "--counts", w / "counts.csv",
                "--permutations", "200"});
  REQUIRE_MESSAGE(c.code == 0, c.err);
  CHECK(c.out.rfind("phone\t1920\t", 0) == 0);
  CHECK(fs::exists(w / "c/zseries.csv"));
}
