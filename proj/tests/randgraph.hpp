// tests/randgraph.hpp

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

// Seeded random miniature graphs over the autodiff op set, for
// finite-difference sweeps. A plan is fixed at construction; build()
// replays it against the leaves' current data, which is exactly what a
// finite-difference oracle needs.

#ifndef IRL_TESTS_RANDGRAPH_HPP
#define IRL_TESTS_RANDGRAPH_HPP

#include <cstdint>
#include <vector>

#include "irl/rng.hpp"
#include "irl/tensor.hpp"

namespace randgraph {

class RandomGraph {
 public:
  explicit RandomGraph(uint64_t seed) {
    irl::Rng rng(irl::derive_seed(seed, irl::Stream::kTest, "randgraph"));
    const int n_leaves = 2 + rng.uniform_int(2);
    for (int i = 0; i < n_leaves; ++i) {
      irl::Shape s{1 + rng.uniform_int(5), 1 + rng.uniform_int(5)};
      std::vector<double> v(s.numel());
      for (auto& x : v) {
        const double mag = rng.uniform(0.2, 1.5);
        x = rng.uniform() < 0.5 ? -mag : mag;
      }
      leaves.push_back(irl::Tensor::leaf(s, v, true));
      shapes_.push_back(s);
    }
    const int n_steps = 6 + rng.uniform_int(6);
    for (int k = 0; k < n_steps; ++k) {
      plan_step(rng);
    }
  }

  // Rebuilds the planned graph; every pool entry feeds the loss so all
  // leaves stay connected.
  irl::Tensor build() const {
    std::vector<irl::Tensor> pool = leaves;
    for (const Step& s : plan_) {
      apply(pool, s);
    }
    irl::Tensor loss = irl::Tensor::scalar(0.0);
    for (size_t k = 0; k < pool.size(); ++k) {
      loss = irl::add(loss, irl::mul_scalar(irl::mean(pool[k]), 0.1 * ((k % 3) + 1)));
    }
    return loss;
  }

  std::vector<irl::Tensor> leaves;

 private:
  struct Step {
    int op = 0;
    int a = 0, b = 0;
    int axis = 0;
    int r0 = 0, r1 = 0, c0 = 0, c1 = 0;
    double scalar = 0.0;
  };

  void plan_step(irl::Rng& rng) {
    for (int attempt = 0; attempt < 16; ++attempt) {
      Step s;
      s.op = rng.uniform_int(14);
      s.a = rng.uniform_int(static_cast<int>(shapes_.size()));
      const irl::Shape sa = shapes_[static_cast<size_t>(s.a)];
      switch (s.op) {
        case 0:  // tanh
        case 1:  // sigmoid
        case 12: // square
          plan_.push_back(s);
          shapes_.push_back(sa);
          return;
        case 2:   // add
        case 3:   // sub
        case 4:   // mul
        case 13:  // dot -> scalar
        {
          int match = -1;
          for (size_t j = 0; j < shapes_.size(); ++j) {
            if (shapes_[j] == sa && static_cast<int>(j) != s.a) match = static_cast<int>(j);
          }
          if (match < 0) match = s.a;  // degenerate but valid: op(x, x)
          s.b = match;
          plan_.push_back(s);
          shapes_.push_back(s.op == 13 ? irl::Shape{1, 1} : sa);
          return;
        }
        case 5: {  // matmul
          int match = -1;
          for (size_t j = 0; j < shapes_.size(); ++j) {
            if (shapes_[j].r == sa.c) match = static_cast<int>(j);
          }
          if (match < 0) break;
          s.b = match;
          plan_.push_back(s);
          shapes_.push_back({sa.r, shapes_[static_cast<size_t>(match)].c});
          return;
        }
        case 6: {  // concat
          s.axis = rng.uniform_int(2);
          int match = -1;
          for (size_t j = 0; j < shapes_.size(); ++j) {
            const bool ok = s.axis == 0 ? shapes_[j].c == sa.c : shapes_[j].r == sa.r;
            if (ok) match = static_cast<int>(j);
          }
          if (match < 0) break;
          s.b = match;
          const irl::Shape sb = shapes_[static_cast<size_t>(match)];
          plan_.push_back(s);
          shapes_.push_back(s.axis == 0 ? irl::Shape{sa.r + sb.r, sa.c}
                                        : irl::Shape{sa.r, sa.c + sb.c});
          return;
        }
        case 7: {  // slice
          s.r0 = rng.uniform_int(sa.r);
          s.r1 = s.r0 + 1 + rng.uniform_int(sa.r - s.r0);
          s.c0 = rng.uniform_int(sa.c);
          s.c1 = s.c0 + 1 + rng.uniform_int(sa.c - s.c0);
          plan_.push_back(s);
          shapes_.push_back({s.r1 - s.r0, s.c1 - s.c0});
          return;
        }
        case 8:  // softmax
          s.axis = rng.uniform_int(2);
          plan_.push_back(s);
          shapes_.push_back(sa);
          return;
        case 9:  // transpose
          plan_.push_back(s);
          shapes_.push_back({sa.c, sa.r});
          return;
        case 10:  // add_scalar
          s.scalar = rng.uniform(-1.0, 1.0);
          plan_.push_back(s);
          shapes_.push_back(sa);
          return;
        case 11:  // mul_scalar
          s.scalar = rng.uniform(-1.2, 1.2);
          plan_.push_back(s);
          shapes_.push_back(sa);
          return;
        default:
          break;
      }
    }
    // No applicable op found; squash something.
    Step s;
    s.op = 0;
    s.a = static_cast<int>(shapes_.size()) - 1;
    plan_.push_back(s);
    shapes_.push_back(shapes_.back());
  }

  static void apply(std::vector<irl::Tensor>& pool, const Step& s) {
    const irl::Tensor& a = pool[static_cast<size_t>(s.a)];
    switch (s.op) {
      case 0: pool.push_back(irl::tanh(a)); break;
      case 1: pool.push_back(irl::sigmoid(a)); break;
      case 2: pool.push_back(irl::add(a, pool[static_cast<size_t>(s.b)])); break;
      case 3: pool.push_back(irl::sub(a, pool[static_cast<size_t>(s.b)])); break;
      case 4: pool.push_back(irl::mul(a, pool[static_cast<size_t>(s.b)])); break;
      case 5: pool.push_back(irl::matmul(a, pool[static_cast<size_t>(s.b)])); break;
      case 6: pool.push_back(irl::concat(a, pool[static_cast<size_t>(s.b)], s.axis)); break;
      case 7: pool.push_back(irl::slice(a, s.r0, s.r1, s.c0, s.c1)); break;
      case 8: pool.push_back(irl::softmax(a, s.axis)); break;
      case 9: pool.push_back(irl::transpose(a)); break;
      case 10: pool.push_back(irl::add_scalar(a, s.scalar)); break;
      case 11: pool.push_back(irl::mul_scalar(a, s.scalar)); break;
      case 12: pool.push_back(irl::square(a)); break;
      case 13: pool.push_back(irl::dot(a, pool[static_cast<size_t>(s.b)])); break;
      default: break;
    }
  }

  std::vector<irl::Shape> shapes_;
  std::vector<Step> plan_;
};

}  // namespace randgraph

#endif  // IRL_TESTS_RANDGRAPH_HPP
