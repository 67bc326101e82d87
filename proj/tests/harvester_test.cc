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

#include "noun2verb/harvester.h"

#include <map>
#include <string>

#include "doctest.h"
#include "noun2verb/errors.h"
#include "noun2verb/random.h"

namespace noun2verb {
namespace {

std::string Tag(const std::string &sentence) {
  // "put the carpet on the floor" -> first word VERB, rest NOUN/DET/ADP.
  std::string out;
  bool first = true;
  std::size_t start = 0;
  while (start < sentence.size()) {
    std::size_t space = sentence.find(' ', start);
    if (space == std::string::npos) space = sentence.size();
    std::string w = sentence.substr(start, space - start);
    if (!out.empty()) out += ' ';
    out += w + (first ? "/VERB" : "/X");
    first = false;
    start = space + 1;
  }
  return out;
}

TEST_CASE("template rendering") {
  auto t = InstantiateTemplate({"carpet", "floor"}, Relation::kLocatumOn);
  CHECK(t.Render() == "⟨VERB⟩ the carpet on|onto|in|into|to|at the floor");
  auto u = InstantiateTemplate({"porch", "newspaper"}, Relation::kLocationIn);
  CHECK(u.Render() == "⟨VERB⟩ the newspaper on|onto|in|into|to|at the porch");
  CHECK(u.Render() ==
        InstantiateTemplate({"porch", "newspaper"}, Relation::kLocationIn).Render());
  int verbs = 0;
  for (const auto &slot : t.slots) verbs += slot.kind == TemplateSlot::Kind::kVerb;
  CHECK(verbs == 1);
  auto zh = InstantiateTemplate({"carpet", "floor"}, Relation::kLocatumOn,
                                TemplateLanguage::kChinese);
  CHECK(zh.Render() == "⟨VERB⟩ carpet on|onto|in|into|to|at floor");
}

TEST_CASE("toy corpus harvest") {
  std::string text;
  for (int i = 0; i < 3; ++i) text += Tag("put the carpet on the floor") + "\n";
  text += Tag("lay the carpet on the floor") + "\n";
  auto corpus = ParseCorpus(text);
  auto ranked = HarvestParaphrases(corpus, {"carpet", "floor"}, Relation::kLocatumOn, 3);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0] == std::pair<std::string, int>("put", 3));
  CHECK(ranked[1] == std::pair<std::string, int>("lay", 1));
  auto top1 = HarvestParaphrases(corpus, {"carpet", "floor"}, Relation::kLocatumOn, 1);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0].first == "put");
  CHECK(HarvestParaphrases(ParseCorpus(""), {"carpet", "floor"},
                           Relation::kLocatumOn, 3).empty());
  CHECK_THROWS_AS(HarvestParaphrases(corpus, {"carpet", "floor"},
                                     Relation::kLocatumOn, 0), ContractError);
}

TEST_CASE("matching details") {
  auto corpus = ParseCorpus(
      "Laid/VERB/lay carpet/NOUN onto/ADP the/DET floor/NOUN\n"
      "put/NOUN the/DET carpet/NOUN on/ADP the/DET floor/NOUN\n"
      "put/VERB the/DET carpet/NOUN\n"
      "on/ADP the/DET floor/NOUN\n"
      "put/VERB the/DET red/ADJ carpet/NOUN on/ADP the/DET floor/NOUN\n");
  auto ranked = HarvestParaphrases(corpus, {"carpet", "floor"}, Relation::kLocatumOn, 3);
  // Only the first line matches: lemma preferred, article optional, a
  // non-VERB tag, a sentence break or an intervening modifier all block.
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0] == std::pair<std::string, int>("lay", 1));

  auto out = ParseCorpus("dig/VERB the/DET gold/NOUN out/ADP of/ADP the/DET mine/NOUN\n");
  auto r = HarvestParaphrases(out, {"mine", "gold"}, Relation::kLocationOut, 3);
  REQUIRE(r.size() == 1);
  CHECK(r[0].first == "dig");
  auto ref = ParseCorpus("watch/VERB the/DET game/NOUN as/ADP a/DET referee/NOUN\n");
  CHECK(HarvestParaphrases(ref, {"referee", "game"}, Relation::kAgent, 3).size() == 1);
}

TEST_CASE("harvest counts match brute-force rescan") {
  // Random corpora over a tiny alphabet; the oracle counts exact string
  // matches of every expansion of the template.
  const std::vector<std::string> words = {"put", "the", "carpet", "on", "floor", "lay"};
  std::vector<std::string> expansions;
  for (const char *rel : {"on", "onto", "in", "into", "to", "at"}) {
    for (const char *a1 : {"", "the ", "a ", "an "}) {
      for (const char *a2 : {"", "the ", "a ", "an "}) {
        expansions.push_back(std::string(" ") + a1 + "carpet " + rel + " " + a2 + "floor ");
      }
    }
  }
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    std::string text;
    std::map<std::string, int> expected;
    for (int s = 0; s < 20; ++s) {
      std::string plain = " ";
      std::string tagged;
      std::vector<std::string> sent;
      int len = 3 + static_cast<int>(rng.UniformInt(5));
      for (int i = 0; i < len; ++i) sent.push_back(words[rng.UniformInt(words.size())]);
      for (std::size_t i = 0; i < sent.size(); ++i) {
        bool verb = sent[i] == "put" || sent[i] == "lay";
        tagged += (i ? " " : "") + sent[i] + (verb ? "/VERB" : "/X");
      }
      for (std::size_t i = 0; i < sent.size(); ++i) {
        if (sent[i] != "put" && sent[i] != "lay") continue;
        std::string rest = " ";
        for (std::size_t j = i + 1; j < sent.size(); ++j) rest += sent[j] + " ";
        for (const auto &e : expansions) {
          if (rest.rfind(e, 0) == 0) {
            ++expected[sent[i]];
            break;
          }
        }
      }
      text += tagged + "\n";
    }
    auto ranked = HarvestParaphrases(ParseCorpus(text), {"carpet", "floor"},
                                     Relation::kLocatumOn, 10);
    std::map<std::string, int> got(ranked.begin(), ranked.end());
    CHECK(got == expected);
  }
}

TEST_CASE("corpus format errors") {
  try {
    ParseCorpus("put/VERB\nbad-token\n");
    FAIL("expected FormatError");
  } catch (const FormatError &e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(ParseCorpus("a/b/c/d"), FormatError);
  CHECK_THROWS_AS(ParseSynonyms("mail email\n"), FormatError);
}

TEST_CASE("synonym augmentation") {
  auto lexicon = ParseSynonyms("mail\temail,mail, post\nbike\tbicycle\n");
  CHECK(lexicon["mail"] == std::set<std::string>{"email", "post"});
  SupervisedExample mail{{"mail", "letter"}, {}, Source::kAdult, {}};
  SupervisedExample post{{"post", "letter"}, {}, Source::kAdult, {}};
  SupervisedExample mail2{{"mail", "letter"}, {}, Source::kChild, {}};
  auto out = AugmentWithSynonyms({mail, post, mail2}, lexicon);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == Utterance{"email", "letter"});
  CHECK(AugmentWithSynonyms({mail}, {}).empty());
  auto self = ParseSynonyms("mail\tmail\n");
  CHECK(AugmentWithSynonyms({mail}, self).empty());
}

}  // namespace
}  // namespace noun2verb
