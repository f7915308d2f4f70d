// tests/test_decode.cpp

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

#include <cmath>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "irl/decode.hpp"
#include "irl/metrics.hpp"
#include "oracles.hpp"

namespace {

irl::FeatureMatrix make_features(int frames, int coeffs, uint64_t seed) {
  irl::Rng rng(seed);
  irl::FeatureMatrix f;
  f.num_frames = frames;
  f.num_coeffs = coeffs;
  f.values.resize(static_cast<size_t>(frames) * coeffs);
  for (auto& v : f.values) v = rng.normal(0.0, 0.7);
  return f;
}

// Per-step log probabilities computed locally, so the oracles below do
// not lean on the library's softmax helper.
std::vector<double> step_log_probs(const irl::Tensor& logits) {
  const std::vector<double>& z = logits.data();
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  double s = 0.0;
  for (double v : z) s += std::exp(v - mx);
  const double lse = mx + std::log(s);
  std::vector<double> lp(z.size());
  for (size_t i = 0; i < z.size(); ++i) lp[i] = z[i] - lse;
  return lp;
}

struct OracleHyp {
  std::vector<int> ids;
  double log_prob = -1e300;
};

// Greedy decoding as its own loop: argmax token each step until <eos>
// or the length cap.
OracleHyp greedy_decode(const irl::Seq2Seq& m, const irl::FeatureMatrix& f,
                        int max_len) {
  irl::NoGradGuard ng;
  const irl::Vocab v = m.cfg.vocab();
  irl::Tensor enc = irl::encode(m, f);
  irl::DecoderState st = irl::DecoderState::zeros(m.cfg.hidden);
  int prev = v.sos_id;
  OracleHyp h;
  h.log_prob = 0.0;
  for (int t = 0; t < max_len; ++t) {
    auto out = irl::decoder_step(m, enc, prev, st);
    std::vector<double> lp = step_log_probs(out.logits);
    int best = 0;
    for (size_t c = 1; c < lp.size(); ++c) {
      if (lp[c] > lp[best]) best = static_cast<int>(c);
    }
    h.log_prob += lp[best];
    if (best == v.eos_id) return h;
    h.ids.push_back(best);
    st = out.state;
    prev = best;
  }
  return h;
}

// Exhaustive search over every token sequence up to max_len: a branch
// terminates by emitting <eos> or by reaching the cap. Returns the best
// terminal by raw summed log probability.
void exhaust(const irl::Seq2Seq& m, const irl::Tensor& enc,
             const irl::DecoderState& st, int prev, int depth, int max_len,
             std::vector<int>& prefix, double logp, OracleHyp& best) {
  const irl::Vocab v = m.cfg.vocab();
  auto out = irl::decoder_step(m, enc, prev, st);
  std::vector<double> lp = step_log_probs(out.logits);
  for (int c = 0; c < static_cast<int>(lp.size()); ++c) {
    const double total = logp + lp[c];
    if (c == v.eos_id) {
      if (total > best.log_prob) best = {prefix, total};
      continue;
    }
    prefix.push_back(c);
    if (depth + 1 == max_len) {
      if (total > best.log_prob) best = {prefix, total};
    } else {
      exhaust(m, enc, out.state, c, depth + 1, max_len, prefix, total, best);
    }
    prefix.pop_back();
  }
}

OracleHyp exhaustive_decode(const irl::Seq2Seq& m, const irl::FeatureMatrix& f,
                            int max_len) {
  irl::NoGradGuard ng;
  irl::Tensor enc = irl::encode(m, f);
  OracleHyp best;
  std::vector<int> prefix;
  exhaust(m, enc, irl::DecoderState::zeros(m.cfg.hidden), m.cfg.vocab().sos_id,
          0, max_len, prefix, 0.0, best);
  return best;
}

std::string random_string(irl::Rng& rng, int len, int alphabet) {
  std::string s;
  for (int i = 0; i < len; ++i) {
    s += static_cast<char>('a' + rng.uniform_int(alphabet));
  }
  return s;
}

}  // namespace

TEST_CASE("beam width 1 equals greedy decoding on 100 random models",
          "[decode]") {
  for (uint64_t trial = 0; trial < 100; ++trial) {
    irl::ModelConfig cfg;
    cfg.hidden = 4;
    cfg.num_coeffs = 3;
    cfg.n_content = 3;
    irl::Rng rng(irl::derive_seed(500 + trial, irl::Stream::kTest));
    irl::Seq2Seq m = irl::Seq2Seq::init(cfg, rng);
    irl::FeatureMatrix f = make_features(6, 3, 900 + trial);

    irl::Hypothesis beam = irl::beam_search(m, f, 1, 8);
    OracleHyp greedy = greedy_decode(m, f, 8);
    INFO("trial " << trial);
    REQUIRE(beam.ids == greedy.ids);
    REQUIRE(beam.log_prob == Catch::Approx(greedy.log_prob).margin(1e-12));
  }
}

TEST_CASE("wide beam equals exhaustive search on tiny vocabularies",
          "[decode]") {
  // C = 5 tokens, max_len = 4: 5^4 = 625 sequences, width 700 cannot prune.
  for (uint64_t trial = 0; trial < 20; ++trial) {
    irl::ModelConfig cfg;
    cfg.hidden = 3;
    cfg.num_coeffs = 2;
    cfg.n_content = 2;
    irl::Rng rng(irl::derive_seed(1500 + trial, irl::Stream::kTest));
    irl::Seq2Seq m = irl::Seq2Seq::init(cfg, rng);
    irl::FeatureMatrix f = make_features(4, 2, 1900 + trial);

    irl::Hypothesis beam = irl::beam_search(m, f, 700, 4);
    OracleHyp oracle = exhaustive_decode(m, f, 4);
    INFO("trial " << trial);
    REQUIRE(beam.ids == oracle.ids);
    REQUIRE(beam.log_prob == Catch::Approx(oracle.log_prob).margin(1e-10));
  }
}

TEST_CASE("widening the beam never worsens the winning score", "[decode]") {
  for (uint64_t trial = 0; trial < 30; ++trial) {
    irl::ModelConfig cfg;
    cfg.hidden = 4;
    cfg.num_coeffs = 3;
    cfg.n_content = 4;
    irl::Rng rng(irl::derive_seed(2500 + trial, irl::Stream::kTest));
    irl::Seq2Seq m = irl::Seq2Seq::init(cfg, rng);
    irl::FeatureMatrix f = make_features(6, 3, 2900 + trial);

    irl::Hypothesis narrow = irl::beam_search(m, f, 1, 6);
    irl::Hypothesis wide = irl::beam_search(m, f, 10, 6);
    REQUIRE(wide.log_prob >= narrow.log_prob - 1e-12);
    REQUIRE(narrow.log_prob <= 0.0);
    REQUIRE(wide.log_prob <= 0.0);
  }
}

TEST_CASE("beam search is deterministic and validates arguments", "[decode]") {
  irl::ModelConfig cfg;
  cfg.hidden = 5;
  cfg.num_coeffs = 3;
  cfg.n_content = 4;
  irl::Rng rng(irl::derive_seed(41, irl::Stream::kTest));
  irl::Seq2Seq m = irl::Seq2Seq::init(cfg, rng);
  irl::FeatureMatrix f = make_features(8, 3, 42);

  irl::Hypothesis a = irl::beam_search(m, f, 10, 12);
  irl::Hypothesis b = irl::beam_search(m, f, 10, 12);
  REQUIRE(a.ids == b.ids);
  REQUIRE(a.log_prob == b.log_prob);
  REQUIRE(a.tokens == b.tokens);

  REQUIRE_THROWS_AS(irl::beam_search(m, f, 0, 12), irl::ConfigError);
  REQUIRE_THROWS_AS(irl::beam_search(m, f, 10, 0), irl::ConfigError);
}

TEST_CASE("hypothesis text keeps content characters only", "[decode]") {
  irl::ModelConfig cfg;
  cfg.hidden = 4;
  cfg.num_coeffs = 2;
  cfg.n_content = 3;
  irl::Rng rng(irl::derive_seed(43, irl::Stream::kTest));
  irl::Seq2Seq m = irl::Seq2Seq::init(cfg, rng);
  irl::FeatureMatrix f = make_features(5, 2, 44);
  irl::Vocab v = cfg.vocab();

  irl::Hypothesis h = irl::beam_search(m, f, 4, 6);
  std::string expect;
  for (int id : h.ids) {
    REQUIRE(id != v.eos_id);
    if (v.is_content(id)) expect += v.char_of(id);
  }
  REQUIRE(h.tokens == expect);
  REQUIRE(static_cast<int>(h.ids.size()) <= 6);
}

TEST_CASE("cer matches the worked example and edge cases", "[decode]") {
  REQUIRE(irl::cer("kitten", "sitting") == Catch::Approx(3.0 / 7.0).margin(1e-15));
  REQUIRE(irl::edit_distance("kitten", "sitting") == 3);
  REQUIRE(irl::cer("abcde", "abcde") == 0.0);
  REQUIRE(irl::cer("", "abcd") == 1.0);
  REQUIRE(irl::cer("abcd", "ab") == 1.0);  // two insertions over ref length 2
  REQUIRE_THROWS_AS(irl::cer("anything", ""), irl::DegenerateReference);
}

TEST_CASE("cer agrees with the recursive DP oracle on 1000 random pairs",
          "[decode]") {
  irl::Rng rng(irl::derive_seed(45, irl::Stream::kTest));
  for (int i = 0; i < 1000; ++i) {
    const int alphabet = 2 + rng.uniform_int(4);
    std::string hyp = random_string(rng, rng.uniform_int(31), alphabet);
    std::string ref = random_string(rng, 1 + rng.uniform_int(30), alphabet);
    const int got = irl::edit_distance(hyp, ref);
    const size_t want = oracles::dp_edit_distance(hyp, ref);
    INFO("pair " << i << ": '" << hyp << "' vs '" << ref << "'");
    REQUIRE(static_cast<size_t>(got) == want);
    REQUIRE(irl::cer(hyp, ref) ==
            Catch::Approx(static_cast<double>(want) / ref.size()).margin(0.0));
  }
}

TEST_CASE("corpus-level accumulator weights by reference length", "[decode]") {
  irl::CerAccumulator acc;
  acc.add("kitten", "sitting");  // 3 edits over 7
  acc.add("ab", "ab");           // 0 edits over 2
  REQUIRE(acc.value() == Catch::Approx(3.0 / 9.0).margin(1e-15));

  irl::CerAccumulator empty;
  REQUIRE_THROWS_AS(empty.value(), irl::DegenerateReference);
  REQUIRE_THROWS_AS(acc.add("x", ""), irl::DegenerateReference);
}
