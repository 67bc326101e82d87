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

#ifndef NOUN2VERB_PARAMETERS_H_
#define NOUN2VERB_PARAMETERS_H_

#include <map>
#include <random>
#include <string>
#include <vector>

#include "noun2verb/tensor.h"

namespace noun2verb {

// Named trainable tensors. Iteration is ordered by name.
class ParameterSet {
 public:
  // Registers a new gradient-tracking leaf. Names must be unique.
  Tensor &Add(const std::string &name, Shape shape, std::vector<double> values);
  // Glorot-uniform initialized matrix, +-sqrt(6 / (fan_in + fan_out)).
  Tensor &AddGlorot(const std::string &name, std::size_t fan_in,
                    std::size_t fan_out, std::mt19937_64 &rng);
  Tensor &AddZeros(const std::string &name, Shape shape);

  bool Contains(const std::string &name) const;
  Tensor &at(const std::string &name);
  const Tensor &at(const std::string &name) const;

  void ZeroGrad();
  double GradNorm() const;
  std::size_t size() const { return params_.size(); }
  std::vector<std::string> Names() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::map<std::string, Tensor> params_;
};

}  // namespace noun2verb

#endif  // NOUN2VERB_PARAMETERS_H_
