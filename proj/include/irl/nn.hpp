// include/irl/nn.hpp

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

#ifndef IRL_NN_HPP
#define IRL_NN_HPP

#include <cmath>
#include <vector>

#include "irl/rng.hpp"
#include "irl/tensor.hpp"

namespace irl {

// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
inline Tensor init_uniform(Shape s, int fan_in, Rng& rng) {
  const double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> v(s.numel());
  for (auto& x : v) x = rng.uniform(-k, k);
  return Tensor::leaf(s, v, true);
}

// One LSTM layer's parameters. Gates are packed [i; f; g; o] in the
// rows of W and b; the forget block of b starts at 1.0 so early
// training does not wash out cell state.
struct LstmParams {
  Tensor W;  // [4h x (in + h)]
  Tensor b;  // [4h x 1]
  int hidden = 0;

  static LstmParams init(int in_dim, int hidden, Rng& rng) {
    LstmParams p;
    p.hidden = hidden;
    p.W = init_uniform({4 * hidden, in_dim + hidden}, in_dim + hidden, rng);
    std::vector<double> b(static_cast<size_t>(4) * hidden, 0.0);
    for (int i = hidden; i < 2 * hidden; ++i) b[static_cast<size_t>(i)] = 1.0;
    p.b = Tensor::leaf({4 * hidden, 1}, b, true);
    return p;
  }
};

struct LstmState {
  Tensor h;  // [h x 1]
  Tensor c;  // [h x 1]

  static LstmState zeros(int hidden) {
    return {Tensor::zeros({hidden, 1}), Tensor::zeros({hidden, 1})};
  }
};

inline LstmState lstm_step(const LstmParams& p, const Tensor& x,
                           const LstmState& prev) {
  const int h = p.hidden;
  Tensor z = add(matmul(p.W, concat(x, prev.h, 0)), p.b);
  Tensor i = sigmoid(slice(z, 0, h, 0, 1));
  Tensor f = sigmoid(slice(z, h, 2 * h, 0, 1));
  Tensor g = tanh(slice(z, 2 * h, 3 * h, 0, 1));
  Tensor o = sigmoid(slice(z, 3 * h, 4 * h, 0, 1));
  LstmState out;
  out.c = add(mul(f, prev.c), mul(i, g));
  out.h = mul(o, tanh(out.c));
  return out;
}

// Runs one direction over the input columns; returns h states per step.
inline std::vector<Tensor> lstm_run(const LstmParams& p,
                                    const std::vector<Tensor>& xs, bool backward_dir) {
  std::vector<Tensor> hs(xs.size());
  LstmState st = LstmState::zeros(p.hidden);
  if (!backward_dir) {
    for (size_t t = 0; t < xs.size(); ++t) {
      st = lstm_step(p, xs[t], st);
      hs[t] = st.h;
    }
  } else {
    for (size_t t = xs.size(); t-- > 0;) {
      st = lstm_step(p, xs[t], st);
      hs[t] = st.h;
    }
  }
  return hs;
}

// Bidirectional layer: per-step concat of forward and backward states.
inline std::vector<Tensor> blstm_run(const LstmParams& fwd, const LstmParams& bwd,
                                     const std::vector<Tensor>& xs) {
  std::vector<Tensor> hf = lstm_run(fwd, xs, false);
  std::vector<Tensor> hb = lstm_run(bwd, xs, true);
  std::vector<Tensor> out(xs.size());
  for (size_t t = 0; t < xs.size(); ++t) out[t] = concat(hf[t], hb[t], 0);
  return out;
}

struct LinearParams {
  Tensor W;  // [out x in]
  Tensor b;  // [out x 1]

  static LinearParams init(int in_dim, int out_dim, Rng& rng) {
    LinearParams p;
    p.W = init_uniform({out_dim, in_dim}, in_dim, rng);
    p.b = Tensor::leaf({out_dim, 1}, std::vector<double>(static_cast<size_t>(out_dim), 0.0), true);
    return p;
  }

  Tensor operator()(const Tensor& x) const { return add(matmul(W, x), b); }
};

}  // namespace irl

#endif  // IRL_NN_HPP
