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

#include <algorithm>
#include <fstream>
#include <sstream>

#include "noun2verb/errors.h"

namespace noun2verb {
namespace {

std::string ReadFile(const std::string &path, const char *what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> SplitWords(const std::string &phrase) {
  std::istringstream in(phrase);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

TemplateSlot Verb() { return {TemplateSlot::Kind::kVerb, {}}; }
TemplateSlot Word(const std::string &w) { return {TemplateSlot::Kind::kWords, {{w}}}; }

TemplateSlot Alternation(const std::vector<std::string> &phrases) {
  TemplateSlot slot{TemplateSlot::Kind::kWords, {}};
  for (const auto &p : phrases) slot.alternatives.push_back(SplitWords(p));
  return slot;
}

TemplateSlot Article(std::vector<std::string> forms) {
  TemplateSlot slot{TemplateSlot::Kind::kArticle, {}};
  for (auto &f : forms) slot.alternatives.push_back({std::move(f)});
  return slot;
}

bool TokenIs(const TaggedToken &token, const std::string &word) {
  return token.surface == word || (!token.lemma.empty() && token.lemma == word);
}

// Tries to match slots[k..] at sentence position i; on success stores the
// verb form and returns true.
bool MatchFrom(const std::vector<TaggedToken> &sentence, std::size_t i,
               const std::vector<TemplateSlot> &slots, std::size_t k,
               std::string &verb) {
  if (k == slots.size()) return true;
  const TemplateSlot &slot = slots[k];
  switch (slot.kind) {
    case TemplateSlot::Kind::kVerb: {
      if (i >= sentence.size() || sentence[i].pos != "VERB") return false;
      std::string form = sentence[i].lemma.empty() ? sentence[i].surface
                                                   : sentence[i].lemma;
      if (!MatchFrom(sentence, i + 1, slots, k + 1, verb)) return false;
      verb = form;
      return true;
    }
    case TemplateSlot::Kind::kArticle:
      if (MatchFrom(sentence, i, slots, k + 1, verb)) return true;
      [[fallthrough]];
    case TemplateSlot::Kind::kWords:
      for (const auto &alt : slot.alternatives) {
        if (i + alt.size() > sentence.size()) continue;
        bool ok = true;
        for (std::size_t j = 0; j < alt.size() && ok; ++j) {
          ok = TokenIs(sentence[i + j], alt[j]);
        }
        if (ok && MatchFrom(sentence, i + alt.size(), slots, k + 1, verb)) {
          return true;
        }
      }
      return false;
  }
  return false;
}

}  // namespace

TokenizedCorpus ParseCorpus(const std::string &text) {
  TokenizedCorpus corpus;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream words(line);
    std::string field;
    std::vector<TaggedToken> sentence;
    while (words >> field) {
      std::vector<std::string> parts;
      std::size_t start = 0;
      while (true) {
        std::size_t slash = field.find('/', start);
        parts.push_back(field.substr(start, slash - start));
        if (slash == std::string::npos) break;
        start = slash + 1;
      }
      if (parts.size() < 2 || parts.size() > 3 || parts[0].empty() ||
          parts[1].empty()) {
        throw FormatError("token '" + field + "' is not surface/POS[/lemma]",
                          line_no);
      }
      TaggedToken token{CaseFold(parts[0]), parts[1], ""};
      for (char &c : token.pos) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      }
      if (parts.size() == 3) token.lemma = CaseFold(parts[2]);
      sentence.push_back(std::move(token));
    }
    if (!sentence.empty()) corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

TokenizedCorpus LoadCorpus(const std::string &path) {
  return ParseCorpus(ReadFile(path, "corpus"));
}

SynonymLexicon ParseSynonyms(const std::string &text) {
  SynonymLexicon lexicon;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("expected token<TAB>syn1,syn2,...", line_no);
    }
    std::string head = CaseFold(line.substr(0, tab));
    auto &syns = lexicon[head];
    std::istringstream list(line.substr(tab + 1));
    std::string syn;
    while (std::getline(list, syn, ',')) {
      syn = CaseFold(syn);
      syn.erase(0, syn.find_first_not_of(' '));
      syn.erase(syn.find_last_not_of(' ') + 1);
      if (!syn.empty() && syn != head) syns.insert(syn);
    }
  }
  return lexicon;
}

SynonymLexicon LoadSynonyms(const std::string &path) {
  return ParseSynonyms(ReadFile(path, "synonym lexicon"));
}

std::string ParaphraseTemplate::Render() const {
  std::string out;
  for (const auto &slot : slots) {
    if (!out.empty()) out += ' ';
    if (slot.kind == TemplateSlot::Kind::kVerb) {
      out += "\u27e8VERB\u27e9";
      continue;
    }
    if (slot.kind == TemplateSlot::Kind::kArticle) {
      out += slot.alternatives.front().front();
      continue;
    }
    for (std::size_t a = 0; a < slot.alternatives.size(); ++a) {
      if (a > 0) out += '|';
      for (std::size_t w = 0; w < slot.alternatives[a].size(); ++w) {
        if (w > 0) out += ' ';
        out += slot.alternatives[a][w];
      }
    }
  }
  return out;
}

ParaphraseTemplate InstantiateTemplate(const Utterance &utterance,
                                       Relation relation,
                                       TemplateLanguage language) {
  const bool english = language == TemplateLanguage::kEnglish;
  auto the = [&](std::vector<TemplateSlot> &slots) {
    if (english) slots.push_back(Article({"the", "a", "an"}));
  };
  const std::string noun = CaseFold(utterance.denominal);
  const std::string context = CaseFold(utterance.context);
  ParaphraseTemplate t;
  t.relation = relation;
  auto &s = t.slots;
  s.push_back(Verb());
  switch (relation) {
    case Relation::kLocatumOn:
    case Relation::kLocatumOut:
      // put the carpet on the floor / remove the shell from the peanuts
      the(s), s.push_back(Word(noun));
      s.push_back(Alternation(RelationalWords(relation)));
      the(s), s.push_back(Word(context));
      break;
    case Relation::kLocationIn:
    case Relation::kLocationOut:
      // drop the newspaper on the porch / dig the gold out of the mine
      the(s), s.push_back(Word(context));
      s.push_back(Alternation(RelationalWords(relation)));
      the(s), s.push_back(Word(noun));
      break;
    case Relation::kDuration:
      // stay in the cabin during the weekend
      s.push_back(Alternation({"in", "at"}));
      the(s), s.push_back(Word(context));
      s.push_back(Alternation(RelationalWords(relation)));
      the(s), s.push_back(Word(noun));
      break;
    case Relation::kAgent:
      // watch the game as a referee
      the(s), s.push_back(Word(context));
      s.push_back(Alternation(RelationalWords(relation)));
      if (english) s.push_back(Article({"a", "an", "the"}));
      s.push_back(Word(noun));
      break;
    case Relation::kGoal:
    case Relation::kInstrument:
      // make the children become orphans / send the resume via email
      the(s), s.push_back(Word(context));
      s.push_back(Alternation(RelationalWords(relation)));
      the(s), s.push_back(Word(noun));
      break;
  }
  return t;
}

std::vector<std::pair<std::string, int>> HarvestParaphrases(
    const TokenizedCorpus &corpus, const Utterance &utterance,
    Relation relation, int top_n, TemplateLanguage language) {
  if (top_n < 1) throw ContractError("top_n must be >= 1");
  ParaphraseTemplate t = InstantiateTemplate(utterance, relation, language);
  std::map<std::string, int> counts;
  for (const auto &sentence : corpus.sentences) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      std::string verb;
      if (MatchFrom(sentence, i, t.slots, 0, verb)) ++counts[verb];
    }
  }
  std::vector<std::pair<std::string, int>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
    return a.second > b.second;
  });
  if (ranked.size() > static_cast<std::size_t>(top_n)) ranked.resize(top_n);
  return ranked;
}

std::vector<Utterance> AugmentWithSynonyms(
    const std::vector<SupervisedExample> &examples,
    const SynonymLexicon &lexicon) {
  std::set<Utterance> supervised, emitted;
  for (const auto &ex : examples) supervised.insert(ex.utterance);
  std::vector<Utterance> out;
  for (const auto &ex : examples) {
    auto it = lexicon.find(CaseFold(ex.utterance.denominal));
    if (it == lexicon.end()) continue;
    for (const auto &syn : it->second) {
      if (syn == ex.utterance.denominal) continue;
      Utterance u{syn, ex.utterance.context};
      if (supervised.count(u) || !emitted.insert(u).second) continue;
      out.push_back(std::move(u));
    }
  }
  return out;
}

}  // namespace noun2verb
