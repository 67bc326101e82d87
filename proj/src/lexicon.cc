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

#include "noun2verb/lexicon.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "noun2verb/errors.h"

namespace noun2verb {

std::string CaseFold(std::string_view token) {
  std::string out(token);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::size_t Vocabulary::Add(std::string_view token, std::uint8_t roles) {
  std::string key = CaseFold(token);
  if (key.empty()) throw ContractError("empty token");
  auto it = ids_.find(key);
  if (it != ids_.end()) {
    roles_[it->second] |= roles;
    return it->second;
  }
  std::size_t id = tokens_.size();
  tokens_.push_back(key);
  roles_.push_back(roles);
  ids_.emplace(std::move(key), id);
  return id;
}

std::optional<std::size_t> Vocabulary::Find(std::string_view token) const {
  auto it = ids_.find(CaseFold(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::HasRole(std::string_view token, Role role) const {
  auto id = Find(token);
  return id && (roles_[*id] & role) != 0;
}

void Vocabulary::RemoveRole(std::string_view token, Role role) {
  if (auto id = Find(token)) {
    roles_[*id] = static_cast<std::uint8_t>(roles_[*id] & ~role);
  }
}

std::vector<std::string> Vocabulary::TokensWithRole(Role role) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (roles_[i] & role) out.push_back(tokens_[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

EmbeddingTable::EmbeddingTable(std::size_t dimension,
                               std::vector<std::string> tokens,
                               std::vector<double> rows)
    : dimension_(dimension), tokens_(std::move(tokens)), rows_(std::move(rows)) {
  if (dimension_ == 0) throw ContractError("embedding dimension must be > 0");
  if (tokens_.empty()) throw ContractError("embedding table has no rows");
  if (rows_.size() != tokens_.size() * dimension_) {
    throw ContractError("embedding rows do not match tokens x dimension");
  }
  oov_.assign(dimension_, 0.0);
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    tokens_[i] = CaseFold(tokens_[i]);
    if (!ids_.emplace(tokens_[i], i).second) {
      throw ContractError("duplicate embedding token '" + tokens_[i] + "'");
    }
    for (std::size_t j = 0; j < dimension_; ++j) {
      double v = rows_[i * dimension_ + j];
      if (!std::isfinite(v)) {
        throw ContractError("non-finite embedding for '" + tokens_[i] + "'");
      }
      oov_[j] += v;
    }
  }
  for (double &v : oov_) v /= static_cast<double>(tokens_.size());
}

bool EmbeddingTable::Contains(std::string_view token) const {
  return ids_.count(CaseFold(token)) > 0;
}

std::span<const double> EmbeddingTable::Embed(std::string_view token) const {
  auto it = ids_.find(CaseFold(token));
  if (it == ids_.end()) return oov_;
  return std::span<const double>(rows_).subspan(it->second * dimension_,
                                                dimension_);
}

std::vector<double> EmbeddingTable::EmbedSequence(
    std::span<const std::string> tokens) const {
  std::vector<double> out;
  out.reserve(tokens.size() * dimension_);
  for (const auto &t : tokens) {
    auto row = Embed(t);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

namespace {

bool IsCount(const std::string &s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch) != 0; });
}

}  // namespace

EmbeddingTable LoadEmbeddings(const std::string &path,
                              const Vocabulary *filter) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open embeddings '" + path + "'");
  std::size_t dimension = 0;
  std::vector<std::string> tokens;
  std::vector<double> rows;
  std::unordered_map<std::string, bool> seen;
  std::string line;
  int line_no = 0;
  int data_lines = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    ++data_lines;
    std::vector<double> row;
    std::string field;
    while (fields >> field) {
      double v = 0.0;
      auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() ||
          !std::isfinite(v)) {
        throw FormatError("bad embedding value '" + field + "'", line_no);
      }
      row.push_back(v);
    }
    if (row.empty()) throw FormatError("token without a vector", line_no);
    // word2vec-style "count dimension" header.
    if (data_lines == 1 && row.size() == 1 && IsCount(token) && IsCount(field)) continue;
    if (dimension == 0) dimension = row.size();
    if (row.size() != dimension) {
      throw FormatError("expected " + std::to_string(dimension) +
                            " values, got " + std::to_string(row.size()),
                        line_no);
    }
    std::string key = CaseFold(token);
    if (filter != nullptr && !filter->Contains(key)) continue;
    if (!seen.emplace(key, true).second) continue;
    tokens.push_back(key);
    rows.insert(rows.end(), row.begin(), row.end());
  }
  if (data_lines == 0) throw FormatError("embeddings file '" + path + "' is empty");
  if (tokens.empty()) {
    throw FormatError("no embeddings in '" + path + "' match the vocabulary");
  }
  return EmbeddingTable(dimension, std::move(tokens), std::move(rows));
}

void WriteEmbeddings(const std::string &path, const EmbeddingTable &table) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write embeddings '" + path + "'");
  out << std::setprecision(17);
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.tokens()[i];
    for (std::size_t j = 0; j < table.dimension(); ++j) {
      out << ' ' << table.rows()[i * table.dimension() + j];
    }
    out << '\n';
  }
}

}  // namespace noun2verb
