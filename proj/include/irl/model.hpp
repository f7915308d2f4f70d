// include/irl/model.hpp

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

#ifndef IRL_MODEL_HPP
#define IRL_MODEL_HPP

#include <string>
#include <utility>
#include <vector>

#include "irl/errors.hpp"
#include "irl/features.hpp"
#include "irl/nn.hpp"
#include "irl/rng.hpp"
#include "irl/tensor.hpp"
#include "irl/vocab.hpp"

namespace irl {

// Attention encoder-decoder with representation tap points.
//
// Encoder: BLSTM over pairs of adjacent frames (halving time to
// T1 = ceil(T/2)), BLSTM, then two unidirectional LSTMs down to
// `hidden`. Decoder: learned token embeddings, dot-product attention
// whose query is the top decoder layer's previous state through a
// learned projection, context concatenated to the first layer's input,
// four LSTM layers, and a linear output over the vocabulary.

struct ModelConfig {
  int hidden = 32;
  int num_coeffs = 13;
  int n_content = 12;  // content characters; vocab adds 3 specials

  Vocab vocab() const { return Vocab::make(n_content); }
  int vocab_size() const { return n_content + 3; }
  bool operator==(const ModelConfig& o) const {
    return hidden == o.hidden && num_coeffs == o.num_coeffs && n_content == o.n_content;
  }
};

// phi_e is the encoder-state matrix [T1 x hidden] (the flattened
// concatenation across time, kept 2-D); phi_dec[l] stacks decoder layer
// l's states across T2 steps; logits is [T2 x C].
struct RepresentationTaps {
  Tensor phi_e;
  std::vector<Tensor> phi_dec;
  Tensor logits;

  // Ordered list e, dec1..dec4, logits — the IRL-C tap set.
  std::vector<Tensor> all() const {
    std::vector<Tensor> out;
    out.push_back(phi_e);
    for (const auto& t : phi_dec) out.push_back(t);
    out.push_back(logits);
    return out;
  }
};

inline const std::vector<std::string>& tap_names() {
  static const std::vector<std::string> names = {"enc", "dec1", "dec2",
                                                 "dec3", "dec4", "logits"};
  return names;
}

struct Seq2Seq {
  ModelConfig cfg;
  LstmParams enc1_fwd, enc1_bwd;  // in: 2 * num_coeffs
  LstmParams enc2_fwd, enc2_bwd;  // in: 2 * hidden
  LstmParams enc3;                // in: 2 * hidden
  LstmParams enc4;                // in: hidden
  Tensor embedding;               // [C x hidden]
  LstmParams dec1;                // in: hidden (embedding) + hidden (context)
  LstmParams dec2, dec3, dec4;    // in: hidden
  Tensor attn_q;                  // [hidden x hidden] query projection
  LinearParams out;               // hidden -> C

  static Seq2Seq init(const ModelConfig& cfg, Rng& rng) {
    Seq2Seq m;
    m.cfg = cfg;
    const int h = cfg.hidden;
    const int C = cfg.vocab_size();
    m.enc1_fwd = LstmParams::init(2 * cfg.num_coeffs, h, rng);
    m.enc1_bwd = LstmParams::init(2 * cfg.num_coeffs, h, rng);
    m.enc2_fwd = LstmParams::init(2 * h, h, rng);
    m.enc2_bwd = LstmParams::init(2 * h, h, rng);
    m.enc3 = LstmParams::init(2 * h, h, rng);
    m.enc4 = LstmParams::init(h, h, rng);
    m.embedding = init_uniform({C, h}, h, rng);
    m.dec1 = LstmParams::init(2 * h, h, rng);
    m.dec2 = LstmParams::init(h, h, rng);
    m.dec3 = LstmParams::init(h, h, rng);
    m.dec4 = LstmParams::init(h, h, rng);
    m.attn_q = init_uniform({h, h}, h, rng);
    m.out = LinearParams::init(h, C, rng);
    return m;
  }

  std::vector<std::pair<std::string, Tensor>> named_parameters() const {
    return {
        {"enc1.fwd.W", enc1_fwd.W}, {"enc1.fwd.b", enc1_fwd.b},
        {"enc1.bwd.W", enc1_bwd.W}, {"enc1.bwd.b", enc1_bwd.b},
        {"enc2.fwd.W", enc2_fwd.W}, {"enc2.fwd.b", enc2_fwd.b},
        {"enc2.bwd.W", enc2_bwd.W}, {"enc2.bwd.b", enc2_bwd.b},
        {"enc3.W", enc3.W},         {"enc3.b", enc3.b},
        {"enc4.W", enc4.W},         {"enc4.b", enc4.b},
        {"embedding", embedding},
        {"dec1.W", dec1.W},         {"dec1.b", dec1.b},
        {"dec2.W", dec2.W},         {"dec2.b", dec2.b},
        {"dec3.W", dec3.W},         {"dec3.b", dec3.b},
        {"dec4.W", dec4.W},         {"dec4.b", dec4.b},
        {"attn.Wq", attn_q},
        {"out.W", out.W},           {"out.b", out.b},
    };
  }

  std::vector<Tensor> parameters() const {
    std::vector<Tensor> out_list;
    for (auto& [name, t] : named_parameters()) out_list.push_back(t);
    return out_list;
  }

  size_t parameter_count() const {
    size_t n = 0;
    for (const auto& t : parameters()) n += t.numel();
    return n;
  }

  // Weight matrices only (no biases, no embedding): the weight-decay
  // scheme's decay set.
  std::vector<Tensor> weight_matrices() const {
    std::vector<Tensor> ws;
    for (auto& [name, t] : named_parameters()) {
      if (name.size() >= 2 && name.substr(name.size() - 2) == ".W") ws.push_back(t);
      if (name == "attn.Wq") ws.push_back(t);
    }
    return ws;
  }
};

// Stacks feature frames t and t+1 into one column per halved step;
// odd T is zero-padded with one frame.
inline std::vector<Tensor> paired_inputs(const FeatureMatrix& f) {
  if (f.num_frames < 1) throw TooShort("empty features");
  const int T1 = (f.num_frames + 1) / 2;
  const int d = f.num_coeffs;
  std::vector<Tensor> xs(static_cast<size_t>(T1));
  for (int t = 0; t < T1; ++t) {
    std::vector<double> v(static_cast<size_t>(2) * d, 0.0);
    for (int j = 0; j < d; ++j) v[static_cast<size_t>(j)] = f.at(2 * t, j);
    if (2 * t + 1 < f.num_frames) {
      for (int j = 0; j < d; ++j) v[static_cast<size_t>(d + j)] = f.at(2 * t + 1, j);
    }
    xs[static_cast<size_t>(t)] = Tensor::leaf({2 * d, 1}, std::move(v), false);
  }
  return xs;
}

// Encoder states as a [T1 x hidden] matrix.
inline Tensor encode(const Seq2Seq& m, const FeatureMatrix& features) {
  std::vector<Tensor> xs = paired_inputs(features);
  std::vector<Tensor> l1 = blstm_run(m.enc1_fwd, m.enc1_bwd, xs);
  std::vector<Tensor> l2 = blstm_run(m.enc2_fwd, m.enc2_bwd, l1);
  std::vector<Tensor> l3 = lstm_run(m.enc3, l2, false);
  std::vector<Tensor> l4 = lstm_run(m.enc4, l3, false);
  std::vector<Tensor> rows(l4.size());
  for (size_t t = 0; t < l4.size(); ++t) rows[t] = transpose(l4[t]);
  return concat(rows, 0);
}

// Dot-product attention over encoder states [T1 x d] with query vector
// [d x 1]; returns the context [d x 1] (and optionally the weights).
inline Tensor attend(const Tensor& enc_states, const Tensor& query,
                     Tensor* weights_out = nullptr) {
  Tensor scores = matmul(enc_states, query);       // [T1 x 1]
  Tensor weights = softmax(scores, 0);             // [T1 x 1]
  Tensor context = matmul(transpose(enc_states), weights);  // [d x 1]
  if (weights_out) *weights_out = weights;
  return context;
}

// One decoder step. Feed the gold (or sampled) previous token id; the
// attention query is the top layer's previous h through the learned
// projection.
struct DecoderState {
  LstmState l1, l2, l3, l4;

  static DecoderState zeros(int hidden) {
    return {LstmState::zeros(hidden), LstmState::zeros(hidden),
            LstmState::zeros(hidden), LstmState::zeros(hidden)};
  }
};

struct DecoderStepOut {
  Tensor logits;  // [C x 1]
  DecoderState state;
  Tensor h1, h2, h3, h4;  // taps
};

inline DecoderStepOut decoder_step(const Seq2Seq& m, const Tensor& enc_states,
                                   int token_id, const DecoderState& prev) {
  if (token_id < 0 || token_id >= m.cfg.vocab_size()) {
    throw VocabError("decoder token id out of range");
  }
  Tensor emb = transpose(row(m.embedding, token_id));  // [h x 1]
  Tensor query = matmul(m.attn_q, prev.l4.h);
  Tensor context = attend(enc_states, query);
  DecoderStepOut out;
  out.state.l1 = lstm_step(m.dec1, concat(emb, context, 0), prev.l1);
  out.state.l2 = lstm_step(m.dec2, out.state.l1.h, prev.l2);
  out.state.l3 = lstm_step(m.dec3, out.state.l2.h, prev.l3);
  out.state.l4 = lstm_step(m.dec4, out.state.l3.h, prev.l4);
  out.h1 = out.state.l1.h;
  out.h2 = out.state.l2.h;
  out.h3 = out.state.l3.h;
  out.h4 = out.state.l4.h;
  out.logits = m.out(out.state.l4.h);
  return out;
}

struct ForwardResult {
  Tensor logits;  // [T2 x C]
  RepresentationTaps taps;
};

// Teacher-forced pass. `target` must start with <sos>; step t consumes
// target[t] and produces the logits for position t.
inline ForwardResult forward_teacher_forced(const Seq2Seq& m,
                                            const FeatureMatrix& features,
                                            const std::vector<int>& target,
                                            bool want_taps = true) {
  if (target.empty() || target[0] != m.cfg.vocab().sos_id) {
    throw VocabError("target must start with <sos>");
  }
  Tensor enc_states = encode(m, features);
  DecoderState st = DecoderState::zeros(m.cfg.hidden);
  const size_t T2 = target.size();
  std::vector<Tensor> logit_rows(T2);
  std::vector<Tensor> h1s(T2), h2s(T2), h3s(T2), h4s(T2);
  for (size_t t = 0; t < T2; ++t) {
    DecoderStepOut step = decoder_step(m, enc_states, target[t], st);
    st = step.state;
    logit_rows[t] = transpose(step.logits);
    h1s[t] = step.h1;
    h2s[t] = step.h2;
    h3s[t] = step.h3;
    h4s[t] = step.h4;
  }
  ForwardResult res;
  res.logits = concat(logit_rows, 0);
  if (want_taps) {
    res.taps.phi_e = enc_states;
    res.taps.phi_dec = {concat(h1s, 0), concat(h2s, 0), concat(h3s, 0),
                        concat(h4s, 0)};
    res.taps.logits = res.logits;
  }
  return res;
}

}  // namespace irl

#endif  // IRL_MODEL_HPP
