// include/irl/decode.hpp

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

#ifndef IRL_DECODE_HPP
#define IRL_DECODE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "irl/errors.hpp"
#include "irl/model.hpp"

namespace irl {

struct Hypothesis {
  std::vector<int> ids;   // emitted token ids, <eos> excluded
  std::string tokens;     // content characters of `ids`
  double log_prob = 0.0;
  bool ended_eos = false; // false: hit the length cap
};

namespace detail {

// Log-softmax of a column of logits, computed on raw values.
inline std::vector<double> log_softmax_col(const Tensor& logits) {
  const std::vector<double>& z = logits.data();
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  double lse = 0.0;
  for (double v : z) lse += std::exp(v - mx);
  lse = mx + std::log(lse);
  std::vector<double> out(z.size());
  for (size_t i = 0; i < z.size(); ++i) out[i] = z[i] - lse;
  return out;
}

}  // namespace detail

// Length-synchronous beam search over characters. Every live hypothesis
// is expanded by all C tokens each step; the top `width` candidates by
// total log probability survive, and candidates emitting <eos> move to
// the finalized pool. Hypotheses still live at max_len finalize there.
// Scores are raw sums of token log probabilities; `length_normalize`
// divides by the emitted length only when picking the winner (off by
// default).
inline Hypothesis beam_search(const Seq2Seq& m, const FeatureMatrix& features,
                              int width = 10, int max_len = 40,
                              bool length_normalize = false) {
  if (width < 1) throw ConfigError("beam width must be >= 1");
  if (max_len < 1) throw ConfigError("beam max_len must be >= 1");
  NoGradGuard ng;
  const Vocab v = m.cfg.vocab();
  const int C = m.cfg.vocab_size();
  Tensor enc_states = encode(m, features);

  struct Item {
    std::vector<int> ids;
    double log_prob = 0.0;
    int prev = 0;
    DecoderState state;
  };
  std::vector<Item> live;
  live.push_back({{}, 0.0, v.sos_id, DecoderState::zeros(m.cfg.hidden)});
  std::vector<Hypothesis> done;

  auto finalize = [&](const Item& it, bool ate_eos) {
    Hypothesis h;
    h.ids = it.ids;
    h.log_prob = it.log_prob;
    h.ended_eos = ate_eos;
    for (int id : h.ids) {
      if (v.is_content(id)) h.tokens += v.char_of(id);
    }
    done.push_back(std::move(h));
  };

  for (int step = 0; step < max_len && !live.empty(); ++step) {
    struct Cand {
      double log_prob;
      int src;
      int tok;
    };
    std::vector<Cand> cands;
    cands.reserve(live.size() * static_cast<size_t>(C));
    std::vector<DecoderStepOut> outs;
    outs.reserve(live.size());
    for (size_t i = 0; i < live.size(); ++i) {
      outs.push_back(decoder_step(m, enc_states, live[i].prev, live[i].state));
      std::vector<double> lp = detail::log_softmax_col(outs[i].logits);
      for (int c = 0; c < C; ++c) {
        cands.push_back({live[i].log_prob + lp[c], static_cast<int>(i), c});
      }
    }
    // Stable sort keeps candidate order (beam index, then token id) on
    // ties, matching greedy's first-argmax convention at width 1.
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& a, const Cand& b) {
                       return a.log_prob > b.log_prob;
                     });
    if (static_cast<int>(cands.size()) > width) cands.resize(width);

    std::vector<Item> next;
    for (const Cand& c : cands) {
      Item it;
      it.ids = live[c.src].ids;
      it.ids.push_back(c.tok);
      it.log_prob = c.log_prob;
      it.prev = c.tok;
      it.state = outs[c.src].state;
      if (c.tok == v.eos_id) {
        it.ids.pop_back();  // <eos> terminates but is not part of the output
        finalize(it, true);
      } else {
        next.push_back(std::move(it));
      }
    }
    live = std::move(next);
  }
  for (const Item& it : live) finalize(it, false);

  auto score = [&](const Hypothesis& h) {
    if (!length_normalize) return h.log_prob;
    const double n = static_cast<double>(h.ids.size()) + 1.0;  // + <eos>
    return h.log_prob / n;
  };
  size_t best = 0;
  for (size_t i = 1; i < done.size(); ++i) {
    if (score(done[i]) > score(done[best])) best = i;
  }
  return done[best];
}

}  // namespace irl

#endif  // IRL_DECODE_HPP
