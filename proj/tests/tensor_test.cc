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

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>

#include "doctest.h"
#include "gradcheck.h"
#include "noun2verb/checkpoint.h"
#include "noun2verb/errors.h"
#include "noun2verb/optimizer.h"
#include "noun2verb/parameters.h"
#include "noun2verb/random.h"
#include "noun2verb/tensor.h"

namespace noun2verb {
namespace {

using testing::CheckGradients;

Tensor RandomVariable(Rng &rng, Shape shape, double scale = 1.0) {
  std::vector<double> v(ShapeSize(shape));
  for (double &x : v) x = rng.Uniform(-scale, scale);
  return Tensor::Variable(std::move(shape), std::move(v));
}

TEST_CASE("matmul hand examples") {
  Tensor a = Tensor::Constant({2, 2}, {1, 2, 3, 4});
  Tensor b = Tensor::Constant({2, 1}, {1, 1});
  Tensor c = MatMul(a, b);
  CHECK(c.shape() == Shape{2, 1});
  CHECK(c.values()[0] == 3.0);
  CHECK(c.values()[1] == 7.0);

  Tensor eye = Tensor::Constant({2, 2}, {1, 0, 0, 1});
  Tensor x = Tensor::Constant({2, 3}, {1, -2, 3, 0.5, 5, -6});
  Tensor y = MatMul(eye, x);
  for (std::size_t i = 0; i < 6; ++i) CHECK(y.values()[i] == x.values()[i]);
}

TEST_CASE("matmul shape mismatch names both shapes") {
  Tensor a = Tensor::Zeros({2, 3});
  Tensor b = Tensor::Zeros({2, 3});
  try {
    MatMul(a, b);
    FAIL("expected DimensionError");
  } catch (const DimensionError &e) {
    std::string msg = e.what();
    CHECK(msg.find("[2x3]") != std::string::npos);
  }
}

TEST_CASE("softmax examples") {
  Tensor s = Softmax(Tensor::Constant({3}, {0, 0, 0}));
  for (double v : s.values()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  Tensor t = Softmax(Tensor::Constant({2}, {std::log(2.0), 0.0}));
  CHECK(t.values()[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(t.values()[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  Tensor big = Softmax(Tensor::Constant({2}, {1000.0, 0.0}));
  CHECK(big.values()[0] == doctest::Approx(1.0));
  CHECK(big.values()[1] < 1e-300);

  CHECK_THROWS_AS(Softmax(Tensor()), DimensionError);
}

TEST_CASE("softmax sums to one and is permutation-equivariant") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng.UniformInt(12);
    std::vector<double> logits(n);
    for (double &x : logits) x = rng.Uniform(-30, 30);
    Tensor p = Softmax(Tensor::Constant({n}, logits));
    double total = 0.0;
    for (double v : p.values()) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    rng.Shuffle(perm);
    std::vector<double> permuted(n);
    for (std::size_t i = 0; i < n; ++i) permuted[i] = logits[perm[i]];
    Tensor q = Softmax(Tensor::Constant({n}, permuted));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(q.values()[i] == doctest::Approx(p.values()[perm[i]]).epsilon(1e-12));
    }
  }
}

TEST_CASE("cross entropy examples") {
  double l4 = std::log(0.25);
  Tensor uniform = Tensor::Constant({4}, {l4, l4, l4, l4});
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(CrossEntropy(uniform, t).item() == doctest::Approx(std::log(4.0)));
  }
  Tensor onehot = Log(Tensor::Constant({3}, {0.0, 1.0, 0.0}));
  CHECK(CrossEntropy(onehot, 1).item() == 0.0);
  CHECK_THROWS_AS(CrossEntropy(uniform, 4), IndexError);
}

TEST_CASE("backward examples") {
  Tensor x = Tensor::Variable({}, {3.0});
  Mul(x, x).Backward();
  CHECK(x.grad()[0] == doctest::Approx(6.0));

  Tensor z = Tensor::Variable({1, 1}, {0.0});
  Tensor logits = ConcatCols({z, Tensor::Constant({1, 1}, {0.0})});
  Tensor p = Softmax(logits);
  Pick(p, std::vector<std::size_t>{0}).Backward();
  CHECK(z.grad()[0] == doctest::Approx(0.25));

  CHECK_THROWS_AS(MatMul(Tensor::Variable({1, 2}, {1, 2}),
                         Tensor::Constant({2, 2}, {1, 0, 0, 1}))
                      .Backward(),
                  ContractError);
}

TEST_CASE("repeated backward accumulates until cleared") {
  Tensor x = Tensor::Variable({2}, {1.0, -2.0});
  Tensor w = Tensor::Constant({2}, {3.0, 4.0});
  Tensor loss = Sum(Mul(Tanh(x), w));
  loss.Backward();
  std::vector<double> once(x.grad().begin(), x.grad().end());
  loss.Backward();
  for (std::size_t i = 0; i < 2; ++i) CHECK(x.grad()[i] == doctest::Approx(2 * once[i]));
  x.ZeroGrad();
  CHECK_FALSE(x.has_grad());
}

TEST_CASE("matmul gradient matches central differences") {
  Rng rng(11);
  std::vector<Tensor> in = {RandomVariable(rng, {3, 4}), RandomVariable(rng, {4, 2})};
  auto r = CheckGradients(in, [&] { return Sum(MatMul(in[0], in[1])); });
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("every differentiable op passes the finite-difference check") {
  Rng rng(2024);
  double worst = 0.0;
  std::size_t cases = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t m = 1 + rng.UniformInt(3), n = 1 + rng.UniformInt(4);
    Tensor weights = Tensor::Constant({m, n}, std::vector<double>(m * n, 0.0));
    {
      auto w = weights.mutable_values();
      for (double &v : w) v = rng.Uniform(-1, 1);
    }
    std::vector<std::function<Tensor(std::vector<Tensor> &)>> ops = {
        [&](auto &in) { return Sum(Mul(Add(in[0], in[1]), weights)); },
        [&](auto &in) { return Sum(Mul(Sub(in[0], in[1]), weights)); },
        [&](auto &in) { return Sum(Mul(Mul(in[0], in[1]), weights)); },
        [&](auto &in) { return Sum(Mul(Scale(in[0], -1.7), weights)); },
        [&](auto &in) { return Sum(Mul(Tanh(in[0]), weights)); },
        [&](auto &in) { return Sum(Mul(Exp(in[0]), weights)); },
        [&](auto &in) { return Sum(Mul(Log(Exp(in[1])), weights)); },
        [&](auto &in) { return Sum(Mul(Softmax(in[0]), weights)); },
        [&](auto &in) { return Sum(Mul(LogSoftmax(in[0]), weights)); },
        [&](auto &in) { return Sum(Mul(Transpose(Transpose(in[0])), weights)); },
        [&](auto &in) { return Sum(Mul(Tanh(AddRowVector(in[0], in[2])), weights)); },
        [&](auto &in) { return Mean(SumRows(Mul(in[0], weights))); },
        [&](auto &in) { return Sum(Mul(Exp(LogSumExpRows(in[0])), Exp(LogSumExpRows(in[1])))); },
        [&](auto &in) {
          std::vector<std::size_t> idx(m);
          for (std::size_t i = 0; i < m; ++i) idx[i] = i % n;
          return Sum(Exp(Pick(in[0], idx)));
        },
        [&](auto &in) {
          std::vector<std::size_t> rows = {0, m - 1, 0};
          return Sum(Tanh(GatherRows(in[0], rows)));
        },
        [&](auto &in) { return Sum(Tanh(RowKron(in[0], in[1]))); },
        [&](auto &in) { return Sum(Tanh(ConcatCols({in[0], in[1], in[0]}))); },
        [&](auto &in) { return CrossEntropy(LogSoftmax(Reshape(in[0], {m * n})), 0); },
    };
    for (auto &op : ops) {
      std::vector<Tensor> in = {RandomVariable(rng, {m, n}), RandomVariable(rng, {m, n}),
                                RandomVariable(rng, {n})};
      auto r = CheckGradients(in, [&] { return op(in); });
      worst = std::max(worst, r.max_relative_error);
      ++cases;
    }
  }
  CHECK(cases >= 100);
  CHECK(worst < 1e-4);
}

TEST_CASE("three-layer network gradient check and determinism") {
  Rng rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Tensor> in = {RandomVariable(rng, {4, 5}), RandomVariable(rng, {5}),
                              RandomVariable(rng, {5, 5}), RandomVariable(rng, {5}),
                              RandomVariable(rng, {5, 3}), RandomVariable(rng, {3})};
    Tensor x = Tensor::Constant({2, 4}, {0.3, -0.2, 0.9, 0.1, -0.5, 0.4, 0.0, 0.7});
    auto loss = [&] {
      Tensor h1 = Tanh(AddRowVector(MatMul(x, in[0]), in[1]));
      Tensor h2 = Tanh(AddRowVector(MatMul(h1, in[2]), in[3]));
      Tensor lp = LogSoftmax(AddRowVector(MatMul(h2, in[4]), in[5]));
      return Scale(Sum(Pick(lp, std::vector<std::size_t>{2, 0})), -1.0);
    };
    auto r = CheckGradients(in, loss);
    CHECK(r.max_relative_error < 1e-4);

    for (auto &t : in) t.ZeroGrad();
    loss().Backward();
    std::vector<double> first(in[0].grad().begin(), in[0].grad().end());
    for (auto &t : in) t.ZeroGrad();
    loss().Backward();
    for (std::size_t i = 0; i < first.size(); ++i) CHECK(in[0].grad()[i] == first[i]);
  }
}

TEST_CASE("log clamps at the floor") {
  Tensor y = Log(Tensor::Constant({2}, {0.0, 1.0}));
  CHECK(y.values()[0] == doctest::Approx(std::log(kLogFloor)));
  CHECK(std::isfinite(y.values()[0]));
}

TEST_CASE("plain gradient step") {
  ParameterSet params;
  Tensor &x = params.Add("x", {}, {1.0});
  Optimizer opt({.kind = OptimizerKind::kGradientDescent, .learning_rate = 0.1});
  Mul(x, x).Backward();
  opt.Step(params);
  CHECK(x.item() == doctest::Approx(0.8));
  CHECK(x.grad()[0] == doctest::Approx(2.0));  // left for the caller to clear
}

TEST_CASE("zero gradient leaves parameters unchanged") {
  for (auto kind : {OptimizerKind::kGradientDescent, OptimizerKind::kAdam}) {
    ParameterSet params;
    Tensor &x = params.Add("x", {2}, {0.5, -0.25});
    Optimizer opt({.kind = kind, .learning_rate = 0.1});
    Sum(Scale(x, 0.0)).Backward();
    opt.Step(params);
    CHECK(x.values()[0] == 0.5);
    CHECK(x.values()[1] == -0.25);
  }
}

TEST_CASE("optimizer without gradients is a contract error") {
  ParameterSet params;
  params.Add("x", {1}, {1.0});
  Optimizer opt;
  CHECK_THROWS_AS(opt.Step(params), ContractError);
}

TEST_CASE("200 steps on a convex quadratic decrease the loss monotonically") {
  // Adam's momentum overshoots at large steps, so it runs with a smaller rate.
  for (auto [kind, lr] : {std::pair{OptimizerKind::kGradientDescent, 0.05},
                          std::pair{OptimizerKind::kAdam, 0.005}}) {
    ParameterSet params;
    Tensor &x = params.Add("x", {3}, {2.0, -1.0, 0.5});
    Tensor a = Tensor::Constant({3}, {1.0, 3.0, 0.5});
    Optimizer opt({.kind = kind, .learning_rate = lr});
    double prev = INFINITY;
    for (int step = 0; step < 200; ++step) {
      params.ZeroGrad();
      Tensor loss = Sum(Mul(a, Mul(x, x)));
      CHECK(loss.item() <= prev);
      prev = loss.item();
      loss.Backward();
      opt.Step(params);
    }
    CHECK(prev < 0.5 * 7.125);  // initial loss 7.125
  }
}

TEST_CASE("parameter names are unique and ordered") {
  ParameterSet params;
  params.AddZeros("b", {1});
  params.AddZeros("a", {1});
  CHECK(params.Names() == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(params.AddZeros("a", {2}), ContractError);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  Rng rng(5);
  Checkpoint ckpt;
  ckpt.manifest = {{"kind", "test"}};
  for (int i = 0; i < 10; ++i) {
    std::size_t m = 1 + rng.UniformInt(4), n = 1 + rng.UniformInt(4);
    std::vector<double> v(m * n);
    for (double &x : v) x = rng.Normal() * std::pow(10.0, rng.Uniform(-300, 300));
    ckpt.tensors.emplace("t" + std::to_string(i), Tensor::Constant({m, n}, v));
  }
  ckpt.tensors.emplace("scalar", Tensor::Scalar(-0.0));
  auto path = std::filesystem::temp_directory_path() / "n2v_ckpt_test.bin";
  WriteCheckpoint(path.string(), ckpt);
  Checkpoint back = ReadCheckpoint(path.string());
  CHECK(back.format_version == kCheckpointVersion);
  CHECK(back.manifest == ckpt.manifest);
  REQUIRE(back.tensors.size() == ckpt.tensors.size());
  for (const auto &[name, t] : ckpt.tensors) {
    const Tensor &u = back.tensors.at(name);
    CHECK(u.shape() == t.shape());
    CHECK(std::memcmp(u.values().data(), t.values().data(), t.size() * sizeof(double)) == 0);
  }
  CHECK(EncodeCheckpoint(back) == EncodeCheckpoint(ckpt));

  std::string bytes = EncodeCheckpoint(ckpt);
  CHECK_THROWS_AS(DecodeCheckpoint(bytes.substr(0, bytes.size() - 3)), FormatError);
  std::string bad = bytes;
  bad[8] = 7;  // version
  CHECK_THROWS_AS(DecodeCheckpoint(bad), FormatError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace noun2verb
