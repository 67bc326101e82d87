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

// Template-based paraphrase mining over a local POS-tagged corpus, plus
// synonym substitution for building unsupervised utterances.
//
// Corpus format: one sentence per line, tokens "surface/POS[/lemma]"
// separated by spaces. Tags follow the universal POS tag set (NOUN, VERB,
// DET, ADP, ...); only VERB is interpreted. Matches are contiguous and never
// cross sentence boundaries. Articles in English templates are optional.

#ifndef NOUN2VERB_HARVESTER_H_
#define NOUN2VERB_HARVESTER_H_

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "noun2verb/data.h"

namespace noun2verb {

enum class TemplateLanguage { kEnglish, kChinese };

struct TaggedToken {
  std::string surface;  // Case-folded.
  std::string pos;
  std::string lemma;  // Empty when absent.
};

struct TokenizedCorpus {
  std::vector<std::vector<TaggedToken>> sentences;
};

TokenizedCorpus ParseCorpus(const std::string &text);
TokenizedCorpus LoadCorpus(const std::string &path);

// Token -> synonyms; a token is never its own synonym.
using SynonymLexicon = std::map<std::string, std::set<std::string>>;
SynonymLexicon ParseSynonyms(const std::string &text);
SynonymLexicon LoadSynonyms(const std::string &path);

struct TemplateSlot {
  enum class Kind { kVerb, kArticle, kWords };
  Kind kind = Kind::kWords;
  // Alternatives, each a sequence of tokens. Articles match any alternative
  // or nothing.
  std::vector<std::vector<std::string>> alternatives;
};

struct ParaphraseTemplate {
  Relation relation = Relation::kLocatumOn;
  std::vector<TemplateSlot> slots;

  // "⟨VERB⟩ the carpet on|onto|in|into|to|at the floor"
  std::string Render() const;
};

ParaphraseTemplate InstantiateTemplate(
    const Utterance &utterance, Relation relation,
    TemplateLanguage language = TemplateLanguage::kEnglish);

// Verbs (lemma when tagged, surface otherwise) filling the verb hole, ranked
// by match count then lexicographically, at most top_n entries.
std::vector<std::pair<std::string, int>> HarvestParaphrases(
    const TokenizedCorpus &corpus, const Utterance &utterance,
    Relation relation, int top_n,
    TemplateLanguage language = TemplateLanguage::kEnglish);

// Replaces each example's denominal verb by its synonyms. Output is
// deduplicated, in first-seen order, and excludes supervised (D, C) pairs.
std::vector<Utterance> AugmentWithSynonyms(
    const std::vector<SupervisedExample> &examples,
    const SynonymLexicon &lexicon);

}  // namespace noun2verb

#endif  // NOUN2VERB_HARVESTER_H_
