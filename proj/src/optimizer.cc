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

#include "noun2verb/optimizer.h"

#include <cmath>

#include "noun2verb/errors.h"

namespace noun2verb {

Optimizer::Optimizer(OptimizerConfig config) : config_(config) {
  if (!(config_.learning_rate > 0.0)) {
    throw ContractError("learning rate must be positive");
  }
}

void Optimizer::Step(ParameterSet &params) {
  bool any = false;
  for (const auto &[name, t] : params) any = any || t.has_grad();
  if (!any) throw ContractError("optimizer step without any gradients");

  ++steps_;
  const double lr = config_.learning_rate;
  for (auto &[name, t] : params) {
    if (!t.has_grad()) continue;
    auto values = t.mutable_values();
    auto grad = t.grad();
    if (config_.kind == OptimizerKind::kGradientDescent) {
      for (std::size_t i = 0; i < values.size(); ++i) values[i] -= lr * grad[i];
      continue;
    }
    Moments &m = moments_[name];
    if (m.first.empty()) {
      m.first.assign(values.size(), 0.0);
      m.second.assign(values.size(), 0.0);
    }
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    for (std::size_t i = 0; i < values.size(); ++i) {
      m.first[i] = b1 * m.first[i] + (1.0 - b1) * grad[i];
      m.second[i] = b2 * m.second[i] + (1.0 - b2) * grad[i] * grad[i];
      double mhat = m.first[i] / c1;
      double vhat = m.second[i] / c2;
      values[i] -= lr * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

}  // namespace noun2verb
