// include/irl/tensor.hpp

// Copyright 2026  irlkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef IRL_TENSOR_HPP
#define IRL_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "irl/errors.hpp"

namespace irl {

// Reverse-mode autodiff over dense row-major f64 matrices. Each forward
// op records its inputs on a node; backward walks exact reverse
// topological order dispatching on an op enum (no per-node closures).
// Scalars are [1 x 1]; column vectors are [n x 1]. Broadcasting is
// limited to explicit scalar-constant ops.

struct Shape {
  int r = 1;
  int c = 1;
  size_t numel() const { return static_cast<size_t>(r) * static_cast<size_t>(c); }
  bool operator==(const Shape& o) const { return r == o.r && c == o.c; }
  bool operator!=(const Shape& o) const { return !(*this == o); }
};

enum class OpKind {
  kLeaf,
  kMatmul,
  kTranspose,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kAddScalar,
  kMulScalar,
  kTanh,
  kSigmoid,
  kRelu,
  kExp,
  kLog,
  kSquare,
  kSqrt,
  kSoftmax,
  kConcat,
  kSlice,
  kSum,
  kMean,
  kDot,
  kL2Norm,
  kGradReverse,
};

struct Node {
  OpKind op = OpKind::kLeaf;
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // allocated lazily; persists on leaves
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  double scalar = 0.0;              // kAddScalar / kMulScalar
  int axis = 0;                     // kSoftmax / kConcat
  int r0 = 0, r1 = 0, c0 = 0, c1 = 0;  // kSlice bounds

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
};

// Evaluation mode: while any guard is alive, ops do not record inputs
// and results never require grad.
inline thread_local int g_no_grad_depth = 0;

struct NoGradGuard {
  NoGradGuard() { ++g_no_grad_depth; }
  ~NoGradGuard() { --g_no_grad_depth; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> n) : n_(std::move(n)) {}

  static Tensor leaf(Shape shape, std::vector<double> data, bool requires_grad) {
    if (data.size() != shape.numel()) throw ShapeError("leaf data size mismatch");
    auto n = std::make_shared<Node>();
    n->shape = shape;
    n->data = std::move(data);
    n->requires_grad = requires_grad && g_no_grad_depth == 0;
    return Tensor(n);
  }

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    return leaf(shape, std::vector<double>(shape.numel(), 0.0), requires_grad);
  }

  static Tensor scalar(double v) { return leaf({1, 1}, {v}, false); }

  bool defined() const { return n_ != nullptr; }
  const Shape& shape() const { return n_->shape; }
  int rows() const { return n_->shape.r; }
  int cols() const { return n_->shape.c; }
  size_t numel() const { return n_->shape.numel(); }
  std::vector<double>& data() const { return n_->data; }
  std::vector<double>& grad() const { return n_->grad; }
  bool requires_grad() const { return n_->requires_grad; }
  std::shared_ptr<Node> node() const { return n_; }

  double value() const {
    if (n_->shape.numel() != 1) throw RankError("value() on non-scalar");
    return n_->data[0];
  }

  double at(int i, int j) const {
    return n_->data[static_cast<size_t>(i) * n_->shape.c + j];
  }

 private:
  std::shared_ptr<Node> n_;
};

namespace detail {

inline std::shared_ptr<Node> new_node(OpKind op, Shape shape,
                                      const std::vector<Tensor>& ins) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->shape = shape;
  n->data.resize(shape.numel());
  bool rg = false;
  for (const auto& t : ins) rg = rg || t.requires_grad();
  n->requires_grad = rg && g_no_grad_depth == 0;
  if (n->requires_grad) {
    n->inputs.reserve(ins.size());
    for (const auto& t : ins) n->inputs.push_back(t.node());
  } else {
    n->op = OpKind::kLeaf;  // constant result; no backward through it
  }
  return n;
}

}  // namespace detail

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul inner dimension mismatch");
  const int m = a.rows(), k = a.cols(), n = b.cols();
  auto node = detail::new_node(OpKind::kMatmul, {m, n}, {a, b});
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = node->data.data();
  if (n == 1) {
    // Matvec fast path: a register accumulator instead of read-modify-
    // write through pc, which the aliasing rules otherwise force.
    for (int i = 0; i < m; ++i) {
      const double* arow = pa + static_cast<size_t>(i) * k;
      double acc = 0.0;
      for (int kk = 0; kk < k; ++kk) acc += arow[kk] * pb[kk];
      pc[i] = acc;
    }
    return Tensor(node);
  }
  for (int i = 0; i < m; ++i) {
    double* crow = pc + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) crow[j] = 0.0;
    const double* arow = pa + static_cast<size_t>(i) * k;
    for (int kk = 0; kk < k; ++kk) {
      const double av = arow[kk];
      const double* brow = pb + static_cast<size_t>(kk) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return Tensor(node);
}

inline Tensor transpose(const Tensor& a) {
  auto node = detail::new_node(OpKind::kTranspose, {a.cols(), a.rows()}, {a});
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      node->data[static_cast<size_t>(j) * a.rows() + i] = a.at(i, j);
    }
  }
  return Tensor(node);
}

namespace detail {

inline Tensor ew_binary(OpKind op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("elementwise shape mismatch");
  auto node = new_node(op, a.shape(), {a, b});
  const auto& da = a.data();
  const auto& db = b.data();
  for (size_t i = 0; i < da.size(); ++i) {
    switch (op) {
      case OpKind::kAdd: node->data[i] = da[i] + db[i]; break;
      case OpKind::kSub: node->data[i] = da[i] - db[i]; break;
      case OpKind::kMul: node->data[i] = da[i] * db[i]; break;
      case OpKind::kDiv: node->data[i] = da[i] / db[i]; break;
      default: throw Error("bad binary op");
    }
  }
  return Tensor(node);
}

inline Tensor ew_unary(OpKind op, const Tensor& a) {
  auto node = new_node(op, a.shape(), {a});
  const auto& d = a.data();
  for (size_t i = 0; i < d.size(); ++i) {
    double v = d[i];
    switch (op) {
      case OpKind::kTanh: v = std::tanh(v); break;
      case OpKind::kSigmoid: v = 1.0 / (1.0 + std::exp(-v)); break;
      case OpKind::kRelu: v = v > 0.0 ? v : 0.0; break;
      case OpKind::kExp: v = std::exp(v); break;
      case OpKind::kLog: v = std::log(v); break;
      case OpKind::kSquare: v = v * v; break;
      case OpKind::kSqrt: v = std::sqrt(v); break;
      case OpKind::kGradReverse: break;  // identity forward
      default: throw Error("bad unary op");
    }
    node->data[i] = v;
  }
  return Tensor(node);
}

}  // namespace detail

inline Tensor add(const Tensor& a, const Tensor& b) { return detail::ew_binary(OpKind::kAdd, a, b); }
inline Tensor sub(const Tensor& a, const Tensor& b) { return detail::ew_binary(OpKind::kSub, a, b); }
inline Tensor mul(const Tensor& a, const Tensor& b) { return detail::ew_binary(OpKind::kMul, a, b); }
inline Tensor div(const Tensor& a, const Tensor& b) { return detail::ew_binary(OpKind::kDiv, a, b); }
inline Tensor tanh(const Tensor& a) { return detail::ew_unary(OpKind::kTanh, a); }
inline Tensor sigmoid(const Tensor& a) { return detail::ew_unary(OpKind::kSigmoid, a); }
inline Tensor relu(const Tensor& a) { return detail::ew_unary(OpKind::kRelu, a); }
inline Tensor exp(const Tensor& a) { return detail::ew_unary(OpKind::kExp, a); }
inline Tensor log(const Tensor& a) { return detail::ew_unary(OpKind::kLog, a); }
inline Tensor square(const Tensor& a) { return detail::ew_unary(OpKind::kSquare, a); }
inline Tensor sqrt(const Tensor& a) { return detail::ew_unary(OpKind::kSqrt, a); }

// Identity forward; negated gradient backward. The adversarial scheme's
// reversal boundary.
inline Tensor grad_reverse(const Tensor& a) {
  return detail::ew_unary(OpKind::kGradReverse, a);
}

inline Tensor add_scalar(const Tensor& a, double s) {
  auto node = detail::new_node(OpKind::kAddScalar, a.shape(), {a});
  node->scalar = s;
  for (size_t i = 0; i < a.data().size(); ++i) node->data[i] = a.data()[i] + s;
  return Tensor(node);
}

inline Tensor mul_scalar(const Tensor& a, double s) {
  auto node = detail::new_node(OpKind::kMulScalar, a.shape(), {a});
  node->scalar = s;
  for (size_t i = 0; i < a.data().size(); ++i) node->data[i] = a.data()[i] * s;
  return Tensor(node);
}

// Softmax along axis 0 (each column) or axis 1 (each row), stabilized
// by max subtraction.
inline Tensor softmax(const Tensor& a, int axis) {
  if (axis != 0 && axis != 1) throw ShapeError("softmax axis must be 0 or 1");
  auto node = detail::new_node(OpKind::kSoftmax, a.shape(), {a});
  node->axis = axis;
  const int R = a.rows(), C = a.cols();
  const int n_slices = axis == 0 ? C : R;
  const int len = axis == 0 ? R : C;
  for (int s = 0; s < n_slices; ++s) {
    auto idx = [&](int i) {
      return axis == 0 ? static_cast<size_t>(i) * C + s
                       : static_cast<size_t>(s) * C + i;
    };
    double mx = a.data()[idx(0)];
    for (int i = 1; i < len; ++i) mx = std::max(mx, a.data()[idx(i)]);
    double z = 0.0;
    for (int i = 0; i < len; ++i) {
      double e = std::exp(a.data()[idx(i)] - mx);
      node->data[idx(i)] = e;
      z += e;
    }
    for (int i = 0; i < len; ++i) node->data[idx(i)] /= z;
  }
  return Tensor(node);
}

inline Tensor concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw ShapeError("concat of nothing");
  if (axis != 0 && axis != 1) throw ShapeError("concat axis must be 0 or 1");
  int R = parts[0].rows(), C = parts[0].cols();
  for (size_t p = 1; p < parts.size(); ++p) {
    if (axis == 0) {
      if (parts[p].cols() != C) throw ShapeError("concat column mismatch");
      R += parts[p].rows();
    } else {
      if (parts[p].rows() != R) throw ShapeError("concat row mismatch");
      C += parts[p].cols();
    }
  }
  auto node = detail::new_node(OpKind::kConcat, {R, C}, parts);
  node->axis = axis;
  if (axis == 0) {
    size_t off = 0;
    for (const auto& p : parts) {
      std::copy(p.data().begin(), p.data().end(), node->data.begin() + static_cast<long>(off));
      off += p.data().size();
    }
  } else {
    int coff = 0;
    for (const auto& p : parts) {
      for (int i = 0; i < R; ++i) {
        for (int j = 0; j < p.cols(); ++j) {
          node->data[static_cast<size_t>(i) * C + coff + j] = p.at(i, j);
        }
      }
      coff += p.cols();
    }
  }
  return Tensor(node);
}

inline Tensor concat(const Tensor& a, const Tensor& b, int axis) {
  return concat(std::vector<Tensor>{a, b}, axis);
}

// Rectangle [r0, r1) x [c0, c1).
inline Tensor slice(const Tensor& a, int r0, int r1, int c0, int c1) {
  if (r0 < 0 || c0 < 0 || r1 > a.rows() || c1 > a.cols() || r0 >= r1 || c0 >= c1) {
    throw ShapeError("slice out of bounds");
  }
  auto node = detail::new_node(OpKind::kSlice, {r1 - r0, c1 - c0}, {a});
  node->r0 = r0;
  node->r1 = r1;
  node->c0 = c0;
  node->c1 = c1;
  for (int i = r0; i < r1; ++i) {
    for (int j = c0; j < c1; ++j) {
      node->data[static_cast<size_t>(i - r0) * (c1 - c0) + (j - c0)] = a.at(i, j);
    }
  }
  return Tensor(node);
}

inline Tensor row(const Tensor& a, int i) { return slice(a, i, i + 1, 0, a.cols()); }

inline Tensor sum(const Tensor& a) {
  auto node = detail::new_node(OpKind::kSum, {1, 1}, {a});
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  node->data[0] = acc;
  return Tensor(node);
}

inline Tensor mean(const Tensor& a) {
  auto node = detail::new_node(OpKind::kMean, {1, 1}, {a});
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  node->data[0] = acc / static_cast<double>(a.numel());
  return Tensor(node);
}

// Same summation order as sum(mul(a, b)): a single linear pass. The
// penalty algebra (pair_penalty(a, a) = -lambda exactly) depends on it.
inline Tensor dot(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("dot shape mismatch");
  auto node = detail::new_node(OpKind::kDot, {1, 1}, {a, b});
  double acc = 0.0;
  for (size_t i = 0; i < a.data().size(); ++i) acc += a.data()[i] * b.data()[i];
  node->data[0] = acc;
  return Tensor(node);
}

inline Tensor l2_norm(const Tensor& a) {
  auto node = detail::new_node(OpKind::kL2Norm, {1, 1}, {a});
  double acc = 0.0;
  for (double v : a.data()) acc += v * v;
  node->data[0] = std::sqrt(acc);
  return Tensor(node);
}

// --- backward ---------------------------------------------------------------

namespace detail {

inline void topo_collect(Node* root, std::vector<Node*>& order) {
  // Iterative post-order DFS over requires_grad nodes.
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->inputs.size()) {
      Node* child = node->inputs[idx].get();
      ++idx;
      if (child->requires_grad && !visited.count(child)) {
        visited.insert(child);
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
}

}  // namespace detail

// Populates gradients of every requires_grad leaf reachable from the
// scalar loss. Leaf gradients accumulate across calls; call zero_grad
// on parameters between iterations.
inline void backward(const Tensor& loss) {
  if (loss.numel() != 1) throw RankError("backward requires a scalar loss");
  Node* root = loss.node().get();
  if (!root->requires_grad) return;
  std::vector<Node*> order;
  detail::topo_collect(root, order);
  // Fresh interior nodes have empty grads; leaves keep accumulated ones.
  for (Node* n : order) n->ensure_grad();
  root->grad[0] += 1.0;
  for (size_t oi = order.size(); oi-- > 0;) {
    Node* n = order[oi];
    const std::vector<double>& gy = n->grad;
    auto in = [&](size_t k) -> Node& { return *n->inputs[k]; };
    auto want = [&](size_t k) { return n->inputs[k]->requires_grad; };
    switch (n->op) {
      case OpKind::kLeaf:
        break;
      case OpKind::kMatmul: {
        Node& a = in(0);
        Node& b = in(1);
        const int m = a.shape.r, k = a.shape.c, c = b.shape.c;
        if (want(0)) {
          a.ensure_grad();
          if (c == 1) {
            // dA[i,:] += gy[i] * b  (axpy rows; hoists the scalar)
            const double* pb = b.data.data();
            for (int i = 0; i < m; ++i) {
              const double g = gy[static_cast<size_t>(i)];
              if (g == 0.0) continue;
              double* garow = a.grad.data() + static_cast<size_t>(i) * k;
              for (int kk = 0; kk < k; ++kk) garow[kk] += g * pb[kk];
            }
          } else {
            for (int i = 0; i < m; ++i) {
              const double* gyrow = gy.data() + static_cast<size_t>(i) * c;
              double* garow = a.grad.data() + static_cast<size_t>(i) * k;
              for (int kk = 0; kk < k; ++kk) {
                const double* brow = b.data.data() + static_cast<size_t>(kk) * c;
                double acc = 0.0;
                for (int j = 0; j < c; ++j) acc += gyrow[j] * brow[j];
                garow[kk] += acc;
              }
            }
          }
        }
        if (want(1)) {
          b.ensure_grad();
          if (c == 1) {
            // dB[kk] += sum_i A[i,kk] * gy[i], walking A row-major; the
            // per-element accumulation order over i is unchanged.
            double* gb = b.grad.data();
            for (int i = 0; i < m; ++i) {
              const double g = gy[static_cast<size_t>(i)];
              if (g == 0.0) continue;
              const double* arow = a.data.data() + static_cast<size_t>(i) * k;
              for (int kk = 0; kk < k; ++kk) gb[kk] += arow[kk] * g;
            }
          } else {
            for (int kk = 0; kk < k; ++kk) {
              double* gbrow = b.grad.data() + static_cast<size_t>(kk) * c;
              for (int i = 0; i < m; ++i) {
                const double av = a.data[static_cast<size_t>(i) * k + kk];
                if (av == 0.0) continue;
                const double* gyrow = gy.data() + static_cast<size_t>(i) * c;
                for (int j = 0; j < c; ++j) gbrow[j] += av * gyrow[j];
              }
            }
          }
        }
        break;
      }
      case OpKind::kTranspose: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          const int R = n->shape.r, C = n->shape.c;  // transposed dims
          for (int i = 0; i < R; ++i) {
            for (int j = 0; j < C; ++j) {
              a.grad[static_cast<size_t>(j) * R + i] += gy[static_cast<size_t>(i) * C + j];
            }
          }
        }
        break;
      }
      case OpKind::kAdd:
      case OpKind::kSub: {
        Node& a = in(0);
        Node& b = in(1);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) a.grad[i] += gy[i];
        }
        if (want(1)) {
          b.ensure_grad();
          const double sgn = n->op == OpKind::kAdd ? 1.0 : -1.0;
          for (size_t i = 0; i < gy.size(); ++i) b.grad[i] += sgn * gy[i];
        }
        break;
      }
      case OpKind::kMul: {
        Node& a = in(0);
        Node& b = in(1);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) a.grad[i] += gy[i] * b.data[i];
        }
        if (want(1)) {
          b.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) b.grad[i] += gy[i] * a.data[i];
        }
        break;
      }
      case OpKind::kDiv: {
        Node& a = in(0);
        Node& b = in(1);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) a.grad[i] += gy[i] / b.data[i];
        }
        if (want(1)) {
          b.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) {
            b.grad[i] -= gy[i] * n->data[i] / b.data[i];
          }
        }
        break;
      }
      case OpKind::kAddScalar: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) a.grad[i] += gy[i];
        }
        break;
      }
      case OpKind::kMulScalar: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) a.grad[i] += n->scalar * gy[i];
        }
        break;
      }
      case OpKind::kTanh: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) {
            a.grad[i] += gy[i] * (1.0 - n->data[i] * n->data[i]);
          }
        }
        break;
      }
      case OpKind::kSigmoid: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) {
            a.grad[i] += gy[i] * n->data[i] * (1.0 - n->data[i]);
          }
        }
        break;
      }
      case OpKind::kRelu: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) {
            if (a.data[i] > 0.0) a.grad[i] += gy[i];
          }
        }
        break;
      }
      case OpKind::kExp: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) a.grad[i] += gy[i] * n->data[i];
        }
        break;
      }
      case OpKind::kLog: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) a.grad[i] += gy[i] / a.data[i];
        }
        break;
      }
      case OpKind::kSquare: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) a.grad[i] += 2.0 * a.data[i] * gy[i];
        }
        break;
      }
      case OpKind::kSqrt: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) a.grad[i] += gy[i] / (2.0 * n->data[i]);
        }
        break;
      }
      case OpKind::kSoftmax: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          const int R = n->shape.r, C = n->shape.c;
          const int n_slices = n->axis == 0 ? C : R;
          const int len = n->axis == 0 ? R : C;
          for (int s = 0; s < n_slices; ++s) {
            auto idx = [&](int i) {
              return n->axis == 0 ? static_cast<size_t>(i) * C + s
                                  : static_cast<size_t>(s) * C + i;
            };
            double dotg = 0.0;
            for (int i = 0; i < len; ++i) dotg += gy[idx(i)] * n->data[idx(i)];
            for (int i = 0; i < len; ++i) {
              a.grad[idx(i)] += n->data[idx(i)] * (gy[idx(i)] - dotg);
            }
          }
        }
        break;
      }
      case OpKind::kConcat: {
        if (n->axis == 0) {
          size_t off = 0;
          for (size_t p = 0; p < n->inputs.size(); ++p) {
            Node& a = in(p);
            if (a.requires_grad) {
              a.ensure_grad();
              for (size_t i = 0; i < a.data.size(); ++i) a.grad[i] += gy[off + i];
            }
            off += a.data.size();
          }
        } else {
          const int C = n->shape.c;
          int coff = 0;
          for (size_t p = 0; p < n->inputs.size(); ++p) {
            Node& a = in(p);
            if (a.requires_grad) {
              a.ensure_grad();
              for (int i = 0; i < a.shape.r; ++i) {
                for (int j = 0; j < a.shape.c; ++j) {
                  a.grad[static_cast<size_t>(i) * a.shape.c + j] +=
                      gy[static_cast<size_t>(i) * C + coff + j];
                }
              }
            }
            coff += a.shape.c;
          }
        }
        break;
      }
      case OpKind::kSlice: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          const int W = n->c1 - n->c0;
          for (int i = n->r0; i < n->r1; ++i) {
            for (int j = n->c0; j < n->c1; ++j) {
              a.grad[static_cast<size_t>(i) * a.shape.c + j] +=
                  gy[static_cast<size_t>(i - n->r0) * W + (j - n->c0)];
            }
          }
        }
        break;
      }
      case OpKind::kSum: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < a.data.size(); ++i) a.grad[i] += gy[0];
        }
        break;
      }
      case OpKind::kMean: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          const double g = gy[0] / static_cast<double>(a.data.size());
          for (size_t i = 0; i < a.data.size(); ++i) a.grad[i] += g;
        }
        break;
      }
      case OpKind::kDot: {
        Node& a = in(0);
        Node& b = in(1);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < a.data.size(); ++i) a.grad[i] += gy[0] * b.data[i];
        }
        if (want(1)) {
          b.ensure_grad();
          for (size_t i = 0; i < b.data.size(); ++i) b.grad[i] += gy[0] * a.data[i];
        }
        break;
      }
      case OpKind::kL2Norm: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          const double norm = n->data[0];
          if (norm > 1e-300) {
            for (size_t i = 0; i < a.data.size(); ++i) {
              a.grad[i] += gy[0] * a.data[i] / norm;
            }
          }
        }
        break;
      }
      case OpKind::kGradReverse: {
        Node& a = in(0);
        if (want(0)) {
          a.ensure_grad();
          for (size_t i = 0; i < gy.size(); ++i) a.grad[i] -= gy[i];
        }
        break;
      }
    }
  }
}

// Tears down a graph iteratively. shared_ptr chains through deep
// recurrent graphs would otherwise unwind recursively and can overflow
// the stack on long sequences.
inline void release_graph(const Tensor& root) {
  if (!root.defined()) return;
  std::vector<std::shared_ptr<Node>> pending;
  pending.push_back(root.node());
  std::unordered_set<Node*> seen{root.node().get()};
  for (size_t i = 0; i < pending.size(); ++i) {
    std::vector<std::shared_ptr<Node>> ins;
    ins.swap(pending[i]->inputs);
    for (auto& child : ins) {
      if (seen.insert(child.get()).second) pending.push_back(std::move(child));
    }
  }
}

}  // namespace irl

#endif  // IRL_TENSOR_HPP
