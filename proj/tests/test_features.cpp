// tests/test_features.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <vector>

#include "irl/corpus.hpp"
#include "irl/features.hpp"
#include "irl/rng.hpp"
#include "irl/signal.hpp"

namespace {

irl::Waveform tone(double freq, double dur_s, double amp = 0.3) {
  irl::Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(static_cast<size_t>(dur_s * 16000));
  for (size_t i = 0; i < w.samples.size(); ++i) {
    w.samples[i] = amp * std::sin(2.0 * M_PI * freq * i / 16000.0);
  }
  return w;
}

irl::Waveform random_wave(uint64_t label, double dur_s) {
  irl::Rng rng(irl::derive_seed(11, irl::Stream::kTest, {label}));
  irl::Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(static_cast<size_t>(dur_s * 16000));
  for (double& s : w.samples) s = rng.uniform(-0.5, 0.5);
  return w;
}

}  // namespace

TEST_CASE("one second of audio yields 98 frames", "[features]") {
  auto w = tone(440.0, 1.0);
  REQUIRE(w.size() == 16000);
  auto m = irl::mfcc(w, irl::FeatureConfig{});
  REQUIRE(m.num_frames == 98);
  REQUIRE(m.num_coeffs == 13);
}

TEST_CASE("frame count formula at the boundaries", "[features]") {
  irl::FeatureConfig cfg;
  irl::Waveform w;
  w.sample_rate = 16000;
  w.samples.assign(400, 0.1);
  REQUIRE(irl::mfcc(w, cfg).num_frames == 1);
  w.samples.assign(559, 0.1);
  REQUIRE(irl::mfcc(w, cfg).num_frames == 1);
  w.samples.assign(560, 0.1);
  REQUIRE(irl::mfcc(w, cfg).num_frames == 2);
  w.samples.assign(399, 0.1);
  REQUIRE_THROWS_AS(irl::mfcc(w, cfg), irl::TooShort);
}

TEST_CASE("silence produces identical frames", "[features]") {
  irl::Waveform w;
  w.sample_rate = 16000;
  w.samples.assign(8000, 0.0);
  auto m = irl::mfcc(w, irl::FeatureConfig{});
  for (int t = 1; t < m.num_frames; ++t) {
    for (int k = 0; k < m.num_coeffs; ++k) {
      REQUIRE(m.at(t, k) == m.at(0, k));
    }
  }
}

TEST_CASE("a tone at a filter's center peaks that filter", "[features]") {
  irl::FeatureConfig cfg;
  auto fb = irl::make_mel_filterbank(cfg, 16000);
  for (int j : {5, 10, 20, 30}) {
    auto w = tone(fb.center_hz[static_cast<size_t>(j)], 0.3);
    auto lm = irl::log_mel(w, cfg);
    const int t = lm.num_frames / 2;
    int argmax = 0;
    for (int m = 1; m < lm.num_coeffs; ++m) {
      if (lm.at(t, m) > lm.at(t, argmax)) argmax = m;
    }
    REQUIRE(argmax == j);
  }
}

TEST_CASE("shifting by one hop shifts frames by one", "[features]") {
  auto w = random_wave(1, 0.5);
  irl::Waveform shifted;
  shifted.sample_rate = 16000;
  shifted.samples.assign(160, 0.0);
  shifted.samples.insert(shifted.samples.end(), w.samples.begin(), w.samples.end());
  auto a = irl::mfcc(w, irl::FeatureConfig{});
  auto b = irl::mfcc(shifted, irl::FeatureConfig{});
  REQUIRE(b.num_frames == a.num_frames + 1);
  for (int t = 1; t < a.num_frames; ++t) {
    for (int k = 0; k < a.num_coeffs; ++k) {
      REQUIRE(b.at(t + 1, k) == Catch::Approx(a.at(t, k)).margin(1e-6));
    }
  }
}

TEST_CASE("the full DCT-II is orthonormal", "[features]") {
  const int n = 40;
  auto m = irl::dct_matrix(n, n);
  // M^T M = I.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        acc += m[static_cast<size_t>(k) * n + i] * m[static_cast<size_t>(k) * n + j];
      }
      REQUIRE(acc == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-9));
    }
  }
  // Round trip recovers the input.
  irl::Rng rng(irl::derive_seed(11, irl::Stream::kTest, "dct"));
  std::vector<double> x(n), c(n, 0.0), back(n, 0.0);
  for (double& v : x) v = rng.uniform(-3.0, 3.0);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) c[static_cast<size_t>(k)] += m[static_cast<size_t>(k) * n + j] * x[static_cast<size_t>(j)];
  }
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) back[static_cast<size_t>(j)] += m[static_cast<size_t>(k) * n + j] * c[static_cast<size_t>(k)];
  }
  for (int j = 0; j < n; ++j) REQUIRE(back[static_cast<size_t>(j)] == Catch::Approx(x[static_cast<size_t>(j)]).margin(1e-9));
}

TEST_CASE("extraction is deterministic", "[features]") {
  auto w = random_wave(2, 0.4);
  auto a = irl::mfcc(w, irl::FeatureConfig{});
  auto b = irl::mfcc(w, irl::FeatureConfig{});
  REQUIRE(a.values == b.values);
}

TEST_CASE("normalization uses frozen statistics", "[features]") {
  std::vector<irl::FeatureMatrix> clean;
  irl::FeatureConfig raw_cfg;
  for (uint64_t i = 0; i < 6; ++i) {
    clean.push_back(irl::mfcc(random_wave(10 + i, 0.4), raw_cfg));
  }
  auto stats = std::make_shared<irl::FeatureStats>(irl::compute_feature_stats(clean));

  irl::FeatureConfig norm_cfg;
  norm_cfg.stats = stats;

  // Normalized output is exactly (raw - mean) / std, for noisy input too.
  auto noisy = random_wave(99, 0.4);
  auto raw = irl::mfcc(noisy, raw_cfg);
  auto norm = irl::mfcc(noisy, norm_cfg);
  for (int t = 0; t < raw.num_frames; ++t) {
    for (int k = 0; k < raw.num_coeffs; ++k) {
      double expect = (raw.at(t, k) - stats->mean[static_cast<size_t>(k)]) / stats->std[static_cast<size_t>(k)];
      REQUIRE(norm.at(t, k) == Catch::Approx(expect).margin(1e-12));
    }
  }

  // The clean split itself standardizes to mean 0, variance 1.
  double sum = 0.0, sum_sq = 0.0;
  size_t n = 0;
  for (uint64_t i = 0; i < 6; ++i) {
    auto m = irl::mfcc(random_wave(10 + i, 0.4), norm_cfg);
    for (double v : m.values) {
      sum += v;
      sum_sq += v * v;
      ++n;
    }
  }
  double mean = sum / static_cast<double>(n);
  REQUIRE(mean == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(sum_sq / static_cast<double>(n) - mean * mean == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("feature blocks round-trip through disk", "[features]") {
  auto m = irl::mfcc(random_wave(3, 0.3), irl::FeatureConfig{});
  auto path = std::filesystem::temp_directory_path() / "irl_feat_block.bin";
  irl::write_feature_block(path, m);
  auto back = irl::read_feature_block(path);
  std::filesystem::remove(path);
  REQUIRE(back.num_frames == m.num_frames);
  REQUIRE(back.num_coeffs == m.num_coeffs);
  for (size_t i = 0; i < m.values.size(); ++i) {
    REQUIRE(back.values[i] == static_cast<double>(static_cast<float>(m.values[i])));
  }
}

TEST_CASE("all feature values are finite on real corpus audio", "[features]") {
  auto vocab = irl::Vocab::make(12);
  irl::Rng rng(irl::derive_seed(11, irl::Stream::kTest, "fin"));
  auto u = irl::synth_utterance("abcdefghijkl", "spk-f", rng, vocab);
  auto m = irl::mfcc(u.audio, irl::FeatureConfig{});
  for (double v : m.values) REQUIRE(std::isfinite(v));
}
