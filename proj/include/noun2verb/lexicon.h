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

#ifndef NOUN2VERB_LEXICON_H_
#define NOUN2VERB_LEXICON_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace noun2verb {

// ASCII lower-casing; bytes outside ASCII pass through unchanged so UTF-8
// tokens (e.g. Chinese) survive intact.
std::string CaseFold(std::string_view token);

enum Role : std::uint8_t {
  kNounCandidate = 1 << 0,
  kContextCandidate = 1 << 1,
  kVerbCandidate = 1 << 2,
  kRelationWord = 1 << 3,
};

// Token <-> dense id bijection with role tags. Tokens are case-folded.
class Vocabulary {
 public:
  std::size_t Add(std::string_view token, std::uint8_t roles = 0);
  std::optional<std::size_t> Find(std::string_view token) const;
  bool Contains(std::string_view token) const { return Find(token).has_value(); }
  const std::string &token(std::size_t id) const { return tokens_.at(id); }
  std::size_t size() const { return tokens_.size(); }

  bool HasRole(std::string_view token, Role role) const;
  void RemoveRole(std::string_view token, Role role);
  // Tokens carrying the role, in lexicographic order.
  std::vector<std::string> TokensWithRole(Role role) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint8_t> roles_;
  std::unordered_map<std::string, std::size_t> ids_;
};

// Pre-trained word vectors. Unknown tokens map to the mean of all rows.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t dimension, std::vector<std::string> tokens,
                 std::vector<double> rows);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string> &tokens() const { return tokens_; }
  const std::vector<double> &rows() const { return rows_; }
  const std::vector<double> &oov_vector() const { return oov_; }

  bool Contains(std::string_view token) const;
  std::span<const double> Embed(std::string_view token) const;
  // Concatenation of Embed() over the tokens, in order.
  std::vector<double> EmbedSequence(std::span<const std::string> tokens) const;

 private:
  std::size_t dimension_ = 0;
  std::vector<std::string> tokens_;
  std::vector<double> rows_;
  std::vector<double> oov_;
  std::unordered_map<std::string, std::size_t> ids_;
};

// Reads "token v1 ... vd" lines. Keeps the first occurrence of a repeated
// token. With a filter, only tokens present in it are kept.
EmbeddingTable LoadEmbeddings(const std::string &path,
                              const Vocabulary *filter = nullptr);
void WriteEmbeddings(const std::string &path, const EmbeddingTable &table);

}  // namespace noun2verb

#endif  // NOUN2VERB_LEXICON_H_
