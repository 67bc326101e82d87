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

#include "noun2verb/tensor.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "noun2verb/errors.h"

namespace noun2verb {

std::string ShapeToString(const Shape &shape) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << "x";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

std::size_t ShapeSize(const Shape &shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

namespace internal {

std::vector<double> &Node::GradBuffer() {
  if (grad.empty()) grad.assign(values.size(), 0.0);
  return grad;
}

}  // namespace internal

namespace {

using internal::Node;

std::shared_ptr<Node> NewLeaf(Shape shape, std::vector<double> values,
                              bool requires_grad) {
  if (shape.size() > 2) {
    throw DimensionError("tensors are limited to rank 2, got " +
                         ShapeToString(shape));
  }
  for (std::size_t d : shape) {
    if (d == 0) {
      throw DimensionError("zero-sized dimension in " + ShapeToString(shape));
    }
  }
  if (ShapeSize(shape) != values.size()) {
    throw DimensionError("shape " + ShapeToString(shape) + " needs " +
                         std::to_string(ShapeSize(shape)) + " values, got " +
                         std::to_string(values.size()));
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  return node;
}

void CheckFinite(const char *op, std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericalError(std::string("non-finite value produced by ") + op);
    }
  }
}

std::size_t RowsOf(const Shape &s) { return s.size() == 2 ? s[0] : 1; }
std::size_t ColsOf(const Shape &s) { return s.empty() ? 1 : s.back(); }

void RequireSameShape(const char *op, const Tensor &a, const Tensor &b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         ShapeToString(a.shape()) + " vs " +
                         ShapeToString(b.shape()));
  }
}

void RequireNotEmpty(const char *op, const Tensor &a) {
  if (!a.defined()) {
    throw DimensionError(std::string(op) + ": undefined (empty) tensor");
  }
}

void Accumulate(Node &target, std::span<const double> delta) {
  if (!target.requires_grad) return;
  auto &g = target.GradBuffer();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += delta[i];
}

}  // namespace

Tensor Tensor::Constant(Shape shape, std::vector<double> values) {
  Tensor t(NewLeaf(std::move(shape), std::move(values), false));
  CheckFinite("Constant", t.values());
  return t;
}

Tensor Tensor::Variable(Shape shape, std::vector<double> values) {
  Tensor t(NewLeaf(std::move(shape), std::move(values), true));
  CheckFinite("Variable", t.values());
  return t;
}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  std::size_t n = ShapeSize(shape);
  return Tensor(NewLeaf(std::move(shape), std::vector<double>(n, 0.0),
                        requires_grad));
}

Tensor Tensor::Scalar(double value) { return Constant({}, {value}); }

const Shape &Tensor::shape() const {
  static const Shape kEmpty;
  return node_ ? node_->shape : kEmpty;
}

std::size_t Tensor::size() const { return node_ ? node_->values.size() : 0; }
std::size_t Tensor::rows() const { return RowsOf(shape()); }
std::size_t Tensor::cols() const { return ColsOf(shape()); }

std::span<const double> Tensor::values() const {
  if (!node_) return {};
  return node_->values;
}

std::span<double> Tensor::mutable_values() {
  if (!node_ || !node_->is_leaf()) {
    throw ContractError("mutable_values() is only allowed on leaf tensors");
  }
  return node_->values;
}

double Tensor::item() const {
  if (size() != 1) {
    throw DimensionError("item() on non-scalar tensor " +
                         ShapeToString(shape()));
  }
  return node_->values[0];
}

double Tensor::at(std::size_t row, std::size_t col) const {
  if (row >= rows() || col >= cols()) {
    throw IndexError("at(" + std::to_string(row) + "," + std::to_string(col) +
                     ") outside " + ShapeToString(shape()));
  }
  return node_->values[row * cols() + col];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }
bool Tensor::has_grad() const { return node_ && !node_->grad.empty(); }

std::span<const double> Tensor::grad() const {
  if (!node_) return {};
  return node_->grad;
}

void Tensor::ZeroGrad() {
  if (node_) node_->grad.clear();
}

void Tensor::Backward() const {
  if (!node_ || node_->values.size() != 1) {
    throw ContractError("Backward() needs a scalar loss, got " +
                        ShapeToString(shape()));
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order (inputs first).
  std::vector<Node *> order;
  std::unordered_set<Node *> seen;
  std::vector<std::pair<Node *, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->parents.size()) {
      Node *parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  // Interior gradients are per-pass; only leaves accumulate across calls.
  for (Node *n : order) {
    if (!n->is_leaf()) n->grad.assign(n->values.size(), 0.0);
  }
  node_->GradBuffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *n = *it;
    if (!n->is_leaf() && n->backward) n->backward(*n);
  }
  for (Node *n : order) {
    if (n->is_leaf()) CheckFinite("Backward", n->grad);
  }
}

internal::Node &NodeOf(const Tensor &t) { return *t.node_; }

Tensor MakeResult(const char *op, Shape shape, std::vector<double> values,
                  std::vector<Tensor> inputs,
                  std::function<void(internal::Node &)> backward) {
  CheckFinite(op, values);
  auto node = NewLeaf(std::move(shape), std::move(values), false);
  bool needs_grad = std::any_of(inputs.begin(), inputs.end(),
                                [](const Tensor &t) {
                                  return t.requires_grad();
                                });
  if (needs_grad) {
    node->requires_grad = true;
    for (auto &in : inputs) node->parents.push_back(in.node_);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

Tensor MatMul(const Tensor &a, const Tensor &b) {
  RequireNotEmpty("MatMul", a);
  RequireNotEmpty("MatMul", b);
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw DimensionError("MatMul: cannot multiply " + ShapeToString(a.shape()) +
                         " by " + ShapeToString(b.shape()));
  }
  std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      double x = av[i * k + p];
      if (x == 0.0) continue;
      const double *brow = &bv[p * n];
      double *orow = &out[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += x * brow[j];
    }
  }
  return MakeResult("MatMul", {m, n}, std::move(out), {a, b},
                    [m, k, n](Node &self) {
                      Node &na = *self.parents[0];
                      Node &nb = *self.parents[1];
                      const auto &g = self.grad;
                      if (na.requires_grad) {
                        auto &ga = na.GradBuffer();
                        for (std::size_t i = 0; i < m; ++i) {
                          for (std::size_t p = 0; p < k; ++p) {
                            double acc = 0.0;
                            for (std::size_t j = 0; j < n; ++j) {
                              acc += g[i * n + j] * nb.values[p * n + j];
                            }
                            ga[i * k + p] += acc;
                          }
                        }
                      }
                      if (nb.requires_grad) {
                        auto &gb = nb.GradBuffer();
                        for (std::size_t i = 0; i < m; ++i) {
                          for (std::size_t p = 0; p < k; ++p) {
                            double x = na.values[i * k + p];
                            if (x == 0.0) continue;
                            for (std::size_t j = 0; j < n; ++j) {
                              gb[p * n + j] += x * g[i * n + j];
                            }
                          }
                        }
                      }
                    });
}

Tensor Transpose(const Tensor &a) {
  RequireNotEmpty("Transpose", a);
  if (a.rank() != 2) {
    throw DimensionError("Transpose needs a matrix, got " +
                         ShapeToString(a.shape()));
  }
  std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * n);
  auto av = a.values();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = av[i * n + j];
  }
  return MakeResult("Transpose", {n, m}, std::move(out), {a},
                    [m, n](Node &self) {
                      Node &na = *self.parents[0];
                      auto &ga = na.GradBuffer();
                      for (std::size_t i = 0; i < m; ++i) {
                        for (std::size_t j = 0; j < n; ++j) {
                          ga[i * n + j] += self.grad[j * m + i];
                        }
                      }
                    });
}

Tensor Reshape(const Tensor &a, Shape shape) {
  RequireNotEmpty("Reshape", a);
  if (ShapeSize(shape) != a.size()) {
    throw DimensionError("Reshape: " + ShapeToString(a.shape()) + " to " +
                         ShapeToString(shape));
  }
  std::vector<double> out(a.values().begin(), a.values().end());
  return MakeResult("Reshape", std::move(shape), std::move(out), {a},
                    [](Node &self) { Accumulate(*self.parents[0], self.grad); });
}

Tensor Add(const Tensor &a, const Tensor &b) {
  RequireSameShape("Add", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.values()[i] + b.values()[i];
  }
  return MakeResult("Add", a.shape(), std::move(out), {a, b}, [](Node &self) {
    Accumulate(*self.parents[0], self.grad);
    Accumulate(*self.parents[1], self.grad);
  });
}

Tensor Sub(const Tensor &a, const Tensor &b) {
  RequireSameShape("Sub", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.values()[i] - b.values()[i];
  }
  return MakeResult("Sub", a.shape(), std::move(out), {a, b}, [](Node &self) {
    Accumulate(*self.parents[0], self.grad);
    Node &nb = *self.parents[1];
    if (nb.requires_grad) {
      auto &gb = nb.GradBuffer();
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= self.grad[i];
    }
  });
}

Tensor Mul(const Tensor &a, const Tensor &b) {
  RequireSameShape("Mul", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.values()[i] * b.values()[i];
  }
  return MakeResult("Mul", a.shape(), std::move(out), {a, b}, [](Node &self) {
    Node &na = *self.parents[0];
    Node &nb = *self.parents[1];
    if (na.requires_grad) {
      auto &ga = na.GradBuffer();
      for (std::size_t i = 0; i < ga.size(); ++i) {
        ga[i] += self.grad[i] * nb.values[i];
      }
    }
    if (nb.requires_grad) {
      auto &gb = nb.GradBuffer();
      for (std::size_t i = 0; i < gb.size(); ++i) {
        gb[i] += self.grad[i] * na.values[i];
      }
    }
  });
}

Tensor Scale(const Tensor &a, double factor) {
  RequireNotEmpty("Scale", a);
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double &v : out) v *= factor;
  return MakeResult("Scale", a.shape(), std::move(out), {a},
                    [factor](Node &self) {
                      Node &na = *self.parents[0];
                      auto &ga = na.GradBuffer();
                      for (std::size_t i = 0; i < ga.size(); ++i) {
                        ga[i] += factor * self.grad[i];
                      }
                    });
}

Tensor Tanh(const Tensor &a) {
  RequireNotEmpty("Tanh", a);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(a.values()[i]);
  return MakeResult("Tanh", a.shape(), std::move(out), {a}, [](Node &self) {
    Node &na = *self.parents[0];
    auto &ga = na.GradBuffer();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      double y = self.values[i];
      ga[i] += self.grad[i] * (1.0 - y * y);
    }
  });
}

Tensor Exp(const Tensor &a) {
  RequireNotEmpty("Exp", a);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(a.values()[i]);
  return MakeResult("Exp", a.shape(), std::move(out), {a}, [](Node &self) {
    Node &na = *self.parents[0];
    auto &ga = na.GradBuffer();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      ga[i] += self.grad[i] * self.values[i];
    }
  });
}

Tensor Log(const Tensor &a) {
  RequireNotEmpty("Log", a);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::log(std::max(a.values()[i], kLogFloor));
  }
  return MakeResult("Log", a.shape(), std::move(out), {a}, [](Node &self) {
    Node &na = *self.parents[0];
    auto &ga = na.GradBuffer();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      double x = na.values[i];
      if (x > kLogFloor) ga[i] += self.grad[i] / x;
    }
  });
}

Tensor AddRowVector(const Tensor &a, const Tensor &row) {
  RequireNotEmpty("AddRowVector", a);
  RequireNotEmpty("AddRowVector", row);
  if (row.size() != a.cols() || row.rows() != 1) {
    throw DimensionError("AddRowVector: cannot add " +
                         ShapeToString(row.shape()) + " to rows of " +
                         ShapeToString(a.shape()));
  }
  std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += row.values()[j];
  }
  return MakeResult("AddRowVector", a.shape(), std::move(out), {a, row},
                    [m, n](Node &self) {
                      Accumulate(*self.parents[0], self.grad);
                      Node &nr = *self.parents[1];
                      if (nr.requires_grad) {
                        auto &gr = nr.GradBuffer();
                        for (std::size_t i = 0; i < m; ++i) {
                          for (std::size_t j = 0; j < n; ++j) {
                            gr[j] += self.grad[i * n + j];
                          }
                        }
                      }
                    });
}

Tensor Softmax(const Tensor &logits) {
  RequireNotEmpty("Softmax", logits);
  std::size_t m = logits.rows(), n = logits.cols();
  auto lv = logits.values();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    const double *row = &lv[i * n];
    double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      out[i * n + j] = std::exp(row[j] - mx);
      z += out[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] /= z;
  }
  return MakeResult("Softmax", logits.shape(), std::move(out), {logits},
                    [m, n](Node &self) {
                      Node &na = *self.parents[0];
                      auto &ga = na.GradBuffer();
                      for (std::size_t i = 0; i < m; ++i) {
                        double dot = 0.0;
                        for (std::size_t j = 0; j < n; ++j) {
                          dot += self.grad[i * n + j] * self.values[i * n + j];
                        }
                        for (std::size_t j = 0; j < n; ++j) {
                          double y = self.values[i * n + j];
                          ga[i * n + j] += y * (self.grad[i * n + j] - dot);
                        }
                      }
                    });
}

Tensor LogSoftmax(const Tensor &logits) {
  RequireNotEmpty("LogSoftmax", logits);
  std::size_t m = logits.rows(), n = logits.cols();
  auto lv = logits.values();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    const double *row = &lv[i * n];
    double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += std::exp(row[j] - mx);
    double lz = mx + std::log(z);
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = row[j] - lz;
  }
  return MakeResult("LogSoftmax", logits.shape(), std::move(out), {logits},
                    [m, n](Node &self) {
                      Node &na = *self.parents[0];
                      auto &ga = na.GradBuffer();
                      for (std::size_t i = 0; i < m; ++i) {
                        double gsum = 0.0;
                        for (std::size_t j = 0; j < n; ++j) {
                          gsum += self.grad[i * n + j];
                        }
                        for (std::size_t j = 0; j < n; ++j) {
                          double p = std::exp(self.values[i * n + j]);
                          ga[i * n + j] += self.grad[i * n + j] - p * gsum;
                        }
                      }
                    });
}

Tensor LogSumExpRows(const Tensor &a) {
  RequireNotEmpty("LogSumExpRows", a);
  std::size_t m = a.rows(), n = a.cols();
  auto av = a.values();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double *row = &av[i * n];
    double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += std::exp(row[j] - mx);
    out[i] = mx + std::log(z);
  }
  Shape shape = a.rank() == 2 ? Shape{m} : Shape{};
  return MakeResult("LogSumExpRows", std::move(shape), std::move(out), {a},
                    [m, n](Node &self) {
                      Node &na = *self.parents[0];
                      auto &ga = na.GradBuffer();
                      for (std::size_t i = 0; i < m; ++i) {
                        for (std::size_t j = 0; j < n; ++j) {
                          double w = std::exp(na.values[i * n + j] -
                                              self.values[i]);
                          ga[i * n + j] += self.grad[i] * w;
                        }
                      }
                    });
}

Tensor Sum(const Tensor &a) {
  RequireNotEmpty("Sum", a);
  double s = std::accumulate(a.values().begin(), a.values().end(), 0.0);
  return MakeResult("Sum", {}, {s}, {a}, [](Node &self) {
    Node &na = *self.parents[0];
    auto &ga = na.GradBuffer();
    for (double &g : ga) g += self.grad[0];
  });
}

Tensor Mean(const Tensor &a) {
  RequireNotEmpty("Mean", a);
  return Scale(Sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor SumRows(const Tensor &a) {
  RequireNotEmpty("SumRows", a);
  std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i] += a.values()[i * n + j];
  }
  Shape shape = a.rank() == 2 ? Shape{m} : Shape{};
  return MakeResult("SumRows", std::move(shape), std::move(out), {a},
                    [m, n](Node &self) {
                      Node &na = *self.parents[0];
                      auto &ga = na.GradBuffer();
                      for (std::size_t i = 0; i < m; ++i) {
                        for (std::size_t j = 0; j < n; ++j) {
                          ga[i * n + j] += self.grad[i];
                        }
                      }
                    });
}

Tensor ConcatCols(const std::vector<Tensor> &parts) {
  if (parts.empty()) throw DimensionError("ConcatCols: no inputs");
  std::size_t m = parts[0].rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto &p : parts) {
    RequireNotEmpty("ConcatCols", p);
    if (p.rank() != 2 || p.rows() != m) {
      throw DimensionError("ConcatCols: cannot join " +
                           ShapeToString(parts[0].shape()) + " with " +
                           ShapeToString(p.shape()));
    }
    widths.push_back(p.cols());
    total += p.cols();
  }
  std::vector<double> out(m * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto pv = parts[k].values();
    for (std::size_t i = 0; i < m; ++i) {
      std::copy_n(&pv[i * widths[k]], widths[k], &out[i * total + offset]);
    }
    offset += widths[k];
  }
  return MakeResult("ConcatCols", {m, total}, std::move(out), parts,
                    [m, total, widths](Node &self) {
                      std::size_t off = 0;
                      for (std::size_t k = 0; k < widths.size(); ++k) {
                        Node &np = *self.parents[k];
                        if (np.requires_grad) {
                          auto &gp = np.GradBuffer();
                          for (std::size_t i = 0; i < m; ++i) {
                            for (std::size_t j = 0; j < widths[k]; ++j) {
                              gp[i * widths[k] + j] +=
                                  self.grad[i * total + off + j];
                            }
                          }
                        }
                        off += widths[k];
                      }
                    });
}

Tensor GatherRows(const Tensor &table, std::span<const std::size_t> indices) {
  RequireNotEmpty("GatherRows", table);
  if (indices.empty()) throw DimensionError("GatherRows: no indices");
  std::size_t m = table.rows(), n = table.cols();
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  std::vector<double> out(idx.size() * n);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] >= m) {
      throw IndexError("GatherRows: row " + std::to_string(idx[r]) +
                       " outside " + ShapeToString(table.shape()));
    }
    std::copy_n(&table.values()[idx[r] * n], n, &out[r * n]);
  }
  std::size_t count = idx.size();
  return MakeResult("GatherRows", {count, n}, std::move(out), {table},
                    [idx = std::move(idx), n](Node &self) {
                      Node &nt = *self.parents[0];
                      auto &gt = nt.GradBuffer();
                      for (std::size_t r = 0; r < idx.size(); ++r) {
                        for (std::size_t j = 0; j < n; ++j) {
                          gt[idx[r] * n + j] += self.grad[r * n + j];
                        }
                      }
                    });
}

Tensor Pick(const Tensor &a, std::span<const std::size_t> indices) {
  RequireNotEmpty("Pick", a);
  std::size_t m = a.rows(), n = a.cols();
  if (indices.size() != m) {
    throw DimensionError("Pick: " + std::to_string(indices.size()) +
                         " indices for " + ShapeToString(a.shape()));
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (idx[i] >= n) {
      throw IndexError("Pick: column " + std::to_string(idx[i]) + " outside " +
                       ShapeToString(a.shape()));
    }
    out[i] = a.values()[i * n + idx[i]];
  }
  Shape shape = a.rank() == 2 ? Shape{m} : Shape{};
  return MakeResult("Pick", std::move(shape), std::move(out), {a},
                    [idx = std::move(idx), n](Node &self) {
                      Node &na = *self.parents[0];
                      auto &ga = na.GradBuffer();
                      for (std::size_t i = 0; i < idx.size(); ++i) {
                        ga[i * n + idx[i]] += self.grad[i];
                      }
                    });
}

Tensor RowKron(const Tensor &a, const Tensor &b) {
  RequireNotEmpty("RowKron", a);
  RequireNotEmpty("RowKron", b);
  if (a.rows() != b.rows() || a.rank() != b.rank()) {
    throw DimensionError("RowKron: row mismatch " + ShapeToString(a.shape()) +
                         " vs " + ShapeToString(b.shape()));
  }
  std::size_t m = a.rows(), p = a.cols(), q = b.cols();
  std::vector<double> out(m * p * q);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double x = a.values()[i * p + j];
      for (std::size_t k = 0; k < q; ++k) {
        out[(i * p + j) * q + k] = x * b.values()[i * q + k];
      }
    }
  }
  Shape shape = a.rank() == 2 ? Shape{m, p * q} : Shape{p * q};
  return MakeResult("RowKron", std::move(shape), std::move(out), {a, b},
                    [m, p, q](Node &self) {
                      Node &na = *self.parents[0];
                      Node &nb = *self.parents[1];
                      for (std::size_t i = 0; i < m; ++i) {
                        for (std::size_t j = 0; j < p; ++j) {
                          for (std::size_t k = 0; k < q; ++k) {
                            double g = self.grad[(i * p + j) * q + k];
                            if (na.requires_grad) {
                              na.GradBuffer()[i * p + j] +=
                                  g * nb.values[i * q + k];
                            }
                            if (nb.requires_grad) {
                              nb.GradBuffer()[i * q + k] +=
                                  g * na.values[i * p + j];
                            }
                          }
                        }
                      }
                    });
}

Tensor Detach(const Tensor &a) {
  RequireNotEmpty("Detach", a);
  return Tensor::Constant(a.shape(),
                          std::vector<double>(a.values().begin(),
                                              a.values().end()));
}

Tensor CrossEntropy(const Tensor &log_probs, std::size_t target_index) {
  RequireNotEmpty("CrossEntropy", log_probs);
  if (log_probs.rows() != 1) {
    throw DimensionError("CrossEntropy needs a vector, got " +
                         ShapeToString(log_probs.shape()));
  }
  if (target_index >= log_probs.size()) {
    throw IndexError("CrossEntropy: target " + std::to_string(target_index) +
                     " outside " + std::to_string(log_probs.size()) +
                     " classes");
  }
  std::size_t t = target_index;
  return MakeResult("CrossEntropy", {}, {-log_probs.values()[t]}, {log_probs},
                    [t](Node &self) {
                      self.parents[0]->GradBuffer()[t] -= self.grad[0];
                    });
}

}  // namespace noun2verb
