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

#include "noun2verb/parameters.h"

#include <cmath>

#include "noun2verb/errors.h"

namespace noun2verb {

Tensor &ParameterSet::Add(const std::string &name, Shape shape,
                          std::vector<double> values) {
  if (params_.count(name) > 0) {
    throw ContractError("duplicate parameter name '" + name + "'");
  }
  auto [it, inserted] = params_.emplace(
      name, Tensor::Variable(std::move(shape), std::move(values)));
  return it->second;
}

Tensor &ParameterSet::AddGlorot(const std::string &name, std::size_t fan_in,
                                std::size_t fan_out, std::mt19937_64 &rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  std::vector<double> values(fan_in * fan_out);
  for (double &v : values) v = dist(rng);
  return Add(name, {fan_in, fan_out}, std::move(values));
}

Tensor &ParameterSet::AddZeros(const std::string &name, Shape shape) {
  std::size_t n = ShapeSize(shape);
  return Add(name, std::move(shape), std::vector<double>(n, 0.0));
}

bool ParameterSet::Contains(const std::string &name) const {
  return params_.count(name) > 0;
}

Tensor &ParameterSet::at(const std::string &name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ContractError("no parameter '" + name + "'");
  return it->second;
}

const Tensor &ParameterSet::at(const std::string &name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ContractError("no parameter '" + name + "'");
  return it->second;
}

void ParameterSet::ZeroGrad() {
  for (auto &[name, t] : params_) t.ZeroGrad();
}

double ParameterSet::GradNorm() const {
  double sq = 0.0;
  for (const auto &[name, t] : params_) {
    for (double g : t.grad()) sq += g * g;
  }
  return std::sqrt(sq);
}

std::vector<std::string> ParameterSet::Names() const {
  std::vector<std::string> names;
  names.reserve(params_.size());
  for (const auto &[name, t] : params_) names.push_back(name);
  return names;
}

}  // namespace noun2verb
