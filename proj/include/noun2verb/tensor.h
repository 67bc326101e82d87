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

// Dense 64-bit tensors (rank 0, 1 or 2) with reverse-mode differentiation.
//
// Every operation records its inputs and a backward closure on the result.
// The recorded graph is the tape: Backward() orders it topologically from the
// loss and visits each node exactly once. Leaves created with Variable()
// accumulate gradients across Backward() calls until ZeroGrad().

#ifndef NOUN2VERB_TENSOR_H_
#define NOUN2VERB_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace noun2verb {

using Shape = std::vector<std::size_t>;

std::string ShapeToString(const Shape &shape);
std::size_t ShapeSize(const Shape &shape);

// Probabilities are clamped to this value before taking logarithms.
inline constexpr double kLogFloor = 1e-12;

namespace internal {

struct Node {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;  // Empty until the first gradient arrives.
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node &self)> backward;

  bool is_leaf() const { return parents.empty(); }
  std::vector<double> &GradBuffer();
};

}  // namespace internal

class Tensor {
 public:
  Tensor() = default;

  // A tensor that never receives gradients.
  static Tensor Constant(Shape shape, std::vector<double> values);
  // A leaf that accumulates gradients (a trainable parameter).
  static Tensor Variable(Shape shape, std::vector<double> values);
  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Scalar(double value);

  bool defined() const { return node_ != nullptr; }
  const Shape &shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  // Matrix view: rank-1 tensors are a single row, scalars are 1x1.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const;
  // Writable view, only allowed on leaves (parameters and constants).
  std::span<double> mutable_values();
  double item() const;
  double at(std::size_t row, std::size_t col) const;

  bool requires_grad() const;
  bool has_grad() const;
  std::span<const double> grad() const;
  void ZeroGrad();

  // Reverse-mode pass from this scalar: accumulates d(this)/d(leaf) into the
  // grad of every reachable leaf that requires gradients.
  void Backward() const;

  bool SameStorage(const Tensor &other) const { return node_ == other.node_; }

 private:
  friend Tensor MakeResult(const char *op, Shape shape,
                           std::vector<double> values,
                           std::vector<Tensor> inputs,
                           std::function<void(internal::Node &)> backward);
  friend internal::Node &NodeOf(const Tensor &t);

  explicit Tensor(std::shared_ptr<internal::Node> node)
      : node_(std::move(node)) {}

  std::shared_ptr<internal::Node> node_;
};

// Builds an op result; checks finiteness and wires the backward closure only
// when some input requires gradients.
Tensor MakeResult(const char *op, Shape shape, std::vector<double> values,
                  std::vector<Tensor> inputs,
                  std::function<void(internal::Node &)> backward);
internal::Node &NodeOf(const Tensor &t);

// Linear algebra.
Tensor MatMul(const Tensor &a, const Tensor &b);
Tensor Transpose(const Tensor &a);
Tensor Reshape(const Tensor &a, Shape shape);

// Elementwise, identical shapes.
Tensor Add(const Tensor &a, const Tensor &b);
Tensor Sub(const Tensor &a, const Tensor &b);
Tensor Mul(const Tensor &a, const Tensor &b);
Tensor Scale(const Tensor &a, double factor);
Tensor Tanh(const Tensor &a);
Tensor Exp(const Tensor &a);
// Natural log with inputs clamped at kLogFloor.
Tensor Log(const Tensor &a);

// Adds a length-n vector to every row of an m x n matrix.
Tensor AddRowVector(const Tensor &a, const Tensor &row);

// Normalizers over the last axis (each row of a matrix, or a whole vector).
Tensor Softmax(const Tensor &logits);
Tensor LogSoftmax(const Tensor &logits);
// Returns one value per row: shape [m] for a matrix, scalar for a vector.
Tensor LogSumExpRows(const Tensor &a);

// Reductions.
Tensor Sum(const Tensor &a);
Tensor Mean(const Tensor &a);
Tensor SumRows(const Tensor &a);

// Indexing.
Tensor ConcatCols(const std::vector<Tensor> &parts);
Tensor GatherRows(const Tensor &table, std::span<const std::size_t> indices);
// out[i] = a[i, indices[i]].
Tensor Pick(const Tensor &a, std::span<const std::size_t> indices);
// Row-wise Kronecker product: out[i, j*q + k] = a[i, j] * b[i, k].
Tensor RowKron(const Tensor &a, const Tensor &b);

// Same values, no gradient flow.
Tensor Detach(const Tensor &a);

// -log_probs[target] for a log-distribution vector.
Tensor CrossEntropy(const Tensor &log_probs, std::size_t target_index);

}  // namespace noun2verb

#endif  // NOUN2VERB_TENSOR_H_
