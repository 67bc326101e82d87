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

#include "noun2verb/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "noun2verb/errors.h"

namespace noun2verb {
namespace {

constexpr char kMagic[8] = {'N', '2', 'V', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void PutLittleEndian(std::string &out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(const std::string &bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i]))
               << (8 * i);
    }
    pos_ += sizeof(T);
    return value;
  }

  std::string GetString(std::size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw FormatError("checkpoint truncated at byte " + std::to_string(pos_));
    }
  }

  const std::string &bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string EncodeCheckpoint(const Checkpoint &checkpoint) {
  std::string out(kMagic, sizeof(kMagic));
  PutLittleEndian<std::uint32_t>(out, checkpoint.format_version);
  std::string manifest = checkpoint.manifest.dump();
  PutLittleEndian<std::uint64_t>(out, manifest.size());
  out += manifest;
  PutLittleEndian<std::uint64_t>(out, checkpoint.tensors.size());
  for (const auto &[name, tensor] : checkpoint.tensors) {
    PutLittleEndian<std::uint64_t>(out, name.size());
    out += name;
    PutLittleEndian<std::uint32_t>(out,
                                   static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t d : tensor.shape()) PutLittleEndian<std::uint64_t>(out, d);
    for (double v : tensor.values()) {
      PutLittleEndian<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    }
  }
  return out;
}

Checkpoint DecodeCheckpoint(const std::string &bytes) {
  Reader in(bytes);
  if (in.GetString(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw FormatError("not a checkpoint file (bad magic)");
  }
  Checkpoint ckpt;
  ckpt.format_version = in.Get<std::uint32_t>();
  if (ckpt.format_version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " +
                      std::to_string(ckpt.format_version));
  }
  auto manifest_len = in.Get<std::uint64_t>();
  try {
    ckpt.manifest = nlohmann::json::parse(in.GetString(manifest_len));
  } catch (const nlohmann::json::parse_error &e) {
    throw FormatError(std::string("checkpoint manifest: ") + e.what());
  }
  auto count = in.Get<std::uint64_t>();
  for (std::uint64_t t = 0; t < count; ++t) {
    auto name_len = in.Get<std::uint64_t>();
    std::string name = in.GetString(name_len);
    auto rank = in.Get<std::uint32_t>();
    if (rank > 2) throw FormatError("tensor '" + name + "' has rank > 2");
    Shape shape;
    for (std::uint32_t r = 0; r < rank; ++r) {
      shape.push_back(static_cast<std::size_t>(in.Get<std::uint64_t>()));
    }
    std::vector<double> values(ShapeSize(shape));
    for (double &v : values) v = std::bit_cast<double>(in.Get<std::uint64_t>());
    ckpt.tensors.emplace(name, Tensor::Constant(shape, std::move(values)));
  }
  if (!in.done()) throw FormatError("trailing bytes after checkpoint");
  return ckpt;
}

void WriteCheckpoint(const std::string &path, const Checkpoint &checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  std::string bytes = EncodeCheckpoint(checkpoint);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing '" + path + "'");
}

Checkpoint ReadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return DecodeCheckpoint(buf.str());
}

}  // namespace noun2verb
