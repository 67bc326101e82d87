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

#ifndef NOUN2VERB_OPTIMIZER_H_
#define NOUN2VERB_OPTIMIZER_H_

#include <map>
#include <string>
#include <vector>

#include "noun2verb/parameters.h"

namespace noun2verb {

enum class OptimizerKind { kGradientDescent, kAdam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First-order update rule. Adam keeps per-parameter moment estimates.
//
// Step() reads the gradients currently stored on the parameters and leaves
// them in place; callers clear them with ParameterSet::ZeroGrad(). A parameter
// that received no gradient this step is treated as having a zero gradient,
// but a step where no parameter holds a gradient is a caller error.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {});

  void Step(ParameterSet &params);

  const OptimizerConfig &config() const { return config_; }
  long steps() const { return steps_; }

 private:
  struct Moments {
    std::vector<double> first;
    std::vector<double> second;
  };

  OptimizerConfig config_;
  long steps_ = 0;
  std::map<std::string, Moments> moments_;
};

}  // namespace noun2verb

#endif  // NOUN2VERB_OPTIMIZER_H_
