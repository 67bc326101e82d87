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

#ifndef NOUN2VERB_RANDOM_H_
#define NOUN2VERB_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace noun2verb {

// Seeded generator with library-independent derived distributions, so that
// seeded results are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }
  // Uniform integer in [0, n).
  std::uint64_t UniformInt(std::uint64_t n);
  // Uniform real in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  double Normal();
  // Index drawn from unnormalized nonnegative weights.
  std::size_t Categorical(std::span<const double> weights);
  // Number of successes in n Bernoulli(p) trials.
  int Binomial(int n, double p);

  template <typename T>
  void Shuffle(std::vector<T> &items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(UniformInt(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::mt19937_64 &engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace noun2verb

#endif  // NOUN2VERB_RANDOM_H_
