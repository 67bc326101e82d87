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

// Binary parameter container.
//
// Layout (all integers little-endian):
//   8 bytes   magic "N2VCKPT\0"
//   u32       format version (kCheckpointVersion)
//   u64       manifest length, then that many bytes of UTF-8 JSON
//   u64       tensor count, then per tensor in name order:
//     u64 name length, name bytes, u32 rank, rank x u64 dims,
//     product(dims) x IEEE-754 binary64 values, row-major
//
// Values are stored as raw bit patterns so a write/read cycle is bit-exact.

#ifndef NOUN2VERB_CHECKPOINT_H_
#define NOUN2VERB_CHECKPOINT_H_

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"
#include "noun2verb/tensor.h"

namespace noun2verb {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint32_t format_version = kCheckpointVersion;
  nlohmann::json manifest = nlohmann::json::object();
  std::map<std::string, Tensor> tensors;
};

void WriteCheckpoint(const std::string &path, const Checkpoint &checkpoint);
// Throws FormatError on a bad magic, unknown version or truncated file.
Checkpoint ReadCheckpoint(const std::string &path);

std::string EncodeCheckpoint(const Checkpoint &checkpoint);
Checkpoint DecodeCheckpoint(const std::string &bytes);

}  // namespace noun2verb

#endif  // NOUN2VERB_CHECKPOINT_H_
