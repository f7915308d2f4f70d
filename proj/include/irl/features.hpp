// include/irl/features.hpp

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

#ifndef IRL_FEATURES_HPP
#define IRL_FEATURES_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <vector>

#include "irl/errors.hpp"
#include "irl/fft.hpp"
#include "irl/wave.hpp"

namespace irl {

// MFCC front end: pre-emphasis, 25 ms / 10 ms Hamming frames, 512-point
// power spectrum, 40 HTK-mel triangular filters over 0-8 kHz, natural
// log with floor, orthonormal DCT-II keeping 13 coefficients, then
// frozen mean/variance normalization from the clean training split.

struct FeatureStats {
  std::vector<double> mean;  // per coefficient
  std::vector<double> std;   // per coefficient, floored away from zero
};

struct FeatureConfig {
  double frame_len_ms = 25.0;
  double frame_hop_ms = 10.0;
  int n_fft = 512;
  int n_mels = 40;
  int n_ceps = 13;
  double preemph = 0.97;
  double log_floor = 1e-10;
  // When set, mfcc() standardizes each coefficient with these frozen
  // statistics; noisy inputs deliberately reuse the clean-split values.
  std::shared_ptr<const FeatureStats> stats;
};

struct FeatureMatrix {
  std::vector<double> values;  // row-major [num_frames x num_coeffs]
  int num_frames = 0;
  int num_coeffs = 0;
  double frame_hop_ms = 10.0;
  double frame_len_ms = 25.0;

  double& at(int t, int c) { return values[static_cast<size_t>(t) * num_coeffs + c]; }
  double at(int t, int c) const {
    return values[static_cast<size_t>(t) * num_coeffs + c];
  }
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// Triangular filters as (first_bin, weights) pairs over the one-sided
// spectrum; filter m spans mel points m-1 .. m+1.
struct MelFilterbank {
  std::vector<int> first_bin;
  std::vector<std::vector<double>> weights;
  std::vector<double> center_hz;
};

inline MelFilterbank make_mel_filterbank(const FeatureConfig& cfg, int sample_rate) {
  const int n_bins = cfg.n_fft / 2 + 1;
  const double f_max = sample_rate / 2.0;
  const double mel_max = hz_to_mel(f_max);
  std::vector<double> pts(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    pts[i] = mel_to_hz(mel_max * i / (cfg.n_mels + 1));
  }
  MelFilterbank fb;
  fb.first_bin.resize(cfg.n_mels);
  fb.weights.resize(cfg.n_mels);
  fb.center_hz.assign(pts.begin() + 1, pts.end() - 1);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double lo = pts[m], mid = pts[m + 1], hi = pts[m + 2];
    int first = -1;
    std::vector<double> w;
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / cfg.n_fft;
      double v = 0.0;
      if (f > lo && f < mid) {
        v = (f - lo) / (mid - lo);
      } else if (f >= mid && f < hi) {
        v = (hi - f) / (hi - mid);
      }
      if (v > 0.0) {
        if (first < 0) first = k;
        w.push_back(v);
      } else if (first >= 0) {
        break;
      }
    }
    if (first < 0) throw NumericError("empty mel filter");
    fb.first_bin[m] = first;
    fb.weights[m] = std::move(w);
  }
  return fb;
}

// Orthonormal DCT-II matrix [n_out x n_in]: row 0 scaled by sqrt(1/n),
// the rest by sqrt(2/n), so the full transform is its own inverse's
// transpose.
inline std::vector<double> dct_matrix(int n_out, int n_in) {
  std::vector<double> m(static_cast<size_t>(n_out) * n_in);
  for (int k = 0; k < n_out; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n_in);
    for (int j = 0; j < n_in; ++j) {
      m[static_cast<size_t>(k) * n_in + j] =
          scale * std::cos(M_PI * k * (2.0 * j + 1.0) / (2.0 * n_in));
    }
  }
  return m;
}

inline int num_frames_for(size_t n_samples, const FeatureConfig& cfg, int rate) {
  const size_t frame_len = static_cast<size_t>(cfg.frame_len_ms / 1000.0 * rate);
  const size_t hop = static_cast<size_t>(cfg.frame_hop_ms / 1000.0 * rate);
  if (n_samples < frame_len) return 0;
  return 1 + static_cast<int>((n_samples - frame_len) / hop);
}

// Log-mel energies [num_frames x n_mels]; the pipeline up to the DCT.
inline FeatureMatrix log_mel(const Waveform& w, const FeatureConfig& cfg) {
  if (w.sample_rate != 16000) throw DegenerateSignal("features expect 16 kHz input");
  const int rate = w.sample_rate;
  const int frame_len = static_cast<int>(cfg.frame_len_ms / 1000.0 * rate);
  const int hop = static_cast<int>(cfg.frame_hop_ms / 1000.0 * rate);
  const int T = num_frames_for(w.size(), cfg, rate);
  if (T < 1) throw TooShort("waveform shorter than one frame");
  if (frame_len > cfg.n_fft) throw ShapeError("frame exceeds fft size");

  std::vector<double> emph(w.size());
  emph[0] = w.samples[0];
  for (size_t i = 1; i < w.size(); ++i) {
    emph[i] = w.samples[i] - cfg.preemph * w.samples[i - 1];
  }

  std::vector<double> hamming(frame_len);
  for (int i = 0; i < frame_len; ++i) {
    hamming[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (frame_len - 1));
  }

  static thread_local MelFilterbank fb_cache;
  static thread_local int fb_key = -1;
  const int key = cfg.n_mels * 1000000 + cfg.n_fft * 10 + rate / 16000;
  if (fb_key != key) {
    fb_cache = make_mel_filterbank(cfg, rate);
    fb_key = key;
  }
  const MelFilterbank& fb = fb_cache;

  FeatureMatrix out;
  out.num_frames = T;
  out.num_coeffs = cfg.n_mels;
  out.frame_hop_ms = cfg.frame_hop_ms;
  out.frame_len_ms = cfg.frame_len_ms;
  out.values.resize(static_cast<size_t>(T) * cfg.n_mels);

  std::vector<std::complex<double>> buf(static_cast<size_t>(cfg.n_fft));
  const int n_bins = cfg.n_fft / 2 + 1;
  std::vector<double> power(static_cast<size_t>(n_bins));
  for (int t = 0; t < T; ++t) {
    const size_t start = static_cast<size_t>(t) * hop;
    for (int i = 0; i < frame_len; ++i) {
      buf[static_cast<size_t>(i)] = {emph[start + i] * hamming[i], 0.0};
    }
    for (int i = frame_len; i < cfg.n_fft; ++i) buf[static_cast<size_t>(i)] = {0.0, 0.0};
    fft_inplace(buf);
    for (int k = 0; k < n_bins; ++k) power[static_cast<size_t>(k)] = std::norm(buf[static_cast<size_t>(k)]);
    for (int m = 0; m < cfg.n_mels; ++m) {
      double acc = 0.0;
      const auto& ws = fb.weights[m];
      const int first = fb.first_bin[m];
      for (size_t j = 0; j < ws.size(); ++j) acc += ws[j] * power[first + j];
      out.at(t, m) = std::log(std::max(acc, cfg.log_floor));
    }
  }
  return out;
}

inline FeatureMatrix mfcc(const Waveform& w, const FeatureConfig& cfg) {
  FeatureMatrix lm = log_mel(w, cfg);
  static thread_local std::vector<double> dct;
  static thread_local int dct_key = -1;
  const int key = cfg.n_ceps * 1000 + cfg.n_mels;
  if (dct_key != key) {
    dct = dct_matrix(cfg.n_ceps, cfg.n_mels);
    dct_key = key;
  }
  FeatureMatrix out;
  out.num_frames = lm.num_frames;
  out.num_coeffs = cfg.n_ceps;
  out.frame_hop_ms = cfg.frame_hop_ms;
  out.frame_len_ms = cfg.frame_len_ms;
  out.values.resize(static_cast<size_t>(lm.num_frames) * cfg.n_ceps);
  for (int t = 0; t < lm.num_frames; ++t) {
    for (int k = 0; k < cfg.n_ceps; ++k) {
      double acc = 0.0;
      for (int m = 0; m < cfg.n_mels; ++m) {
        acc += dct[static_cast<size_t>(k) * cfg.n_mels + m] * lm.at(t, m);
      }
      out.at(t, k) = acc;
    }
  }
  if (cfg.stats) {
    const FeatureStats& st = *cfg.stats;
    if (static_cast<int>(st.mean.size()) != cfg.n_ceps) {
      throw ShapeError("feature stats dimension mismatch");
    }
    for (int t = 0; t < out.num_frames; ++t) {
      for (int k = 0; k < cfg.n_ceps; ++k) {
        out.at(t, k) = (out.at(t, k) - st.mean[k]) / st.std[k];
      }
    }
  }
  for (double v : out.values) {
    if (!std::isfinite(v)) throw NumericError("non-finite feature value");
  }
  return out;
}

// Per-coefficient mean/std over a set of raw (unnormalized) matrices.
inline FeatureStats compute_feature_stats(const std::vector<FeatureMatrix>& mats) {
  if (mats.empty()) throw DegenerateSignal("no matrices for feature stats");
  const int d = mats[0].num_coeffs;
  FeatureStats st;
  st.mean.assign(d, 0.0);
  st.std.assign(d, 0.0);
  size_t n = 0;
  for (const auto& m : mats) {
    if (m.num_coeffs != d) throw ShapeError("coefficient count mismatch");
    for (int t = 0; t < m.num_frames; ++t) {
      for (int k = 0; k < d; ++k) st.mean[k] += m.at(t, k);
    }
    n += static_cast<size_t>(m.num_frames);
  }
  for (int k = 0; k < d; ++k) st.mean[k] /= static_cast<double>(n);
  for (const auto& m : mats) {
    for (int t = 0; t < m.num_frames; ++t) {
      for (int k = 0; k < d; ++k) {
        const double dlt = m.at(t, k) - st.mean[k];
        st.std[k] += dlt * dlt;
      }
    }
  }
  for (int k = 0; k < d; ++k) {
    st.std[k] = std::max(std::sqrt(st.std[k] / static_cast<double>(n)), 1e-8);
  }
  return st;
}

// --- Feature cache blocks -------------------------------------------------
// One file per utterance: u32 num_frames, u32 num_coeffs, then row-major
// f32 values, all little-endian.

inline void write_feature_block(const std::filesystem::path& path,
                                const FeatureMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open feature block for writing: " + path.string());
  auto put_u32 = [&](uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
  };
  put_u32(static_cast<uint32_t>(m.num_frames));
  put_u32(static_cast<uint32_t>(m.num_coeffs));
  for (double v : m.values) {
    float f = static_cast<float>(v);
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(bits);
  }
  if (!out) throw IoError("feature block write failed: " + path.string());
}

inline FeatureMatrix read_feature_block(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature block: " + path.string());
  auto get_u32 = [&]() {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
  };
  FeatureMatrix m;
  m.num_frames = static_cast<int>(get_u32());
  m.num_coeffs = static_cast<int>(get_u32());
  if (!in || m.num_frames < 0 || m.num_coeffs <= 0) {
    throw IoError("malformed feature block header: " + path.string());
  }
  m.values.resize(static_cast<size_t>(m.num_frames) * m.num_coeffs);
  for (double& v : m.values) {
    uint32_t bits = get_u32();
    float f;
    std::memcpy(&f, &bits, 4);
    v = static_cast<double>(f);
  }
  if (!in) throw IoError("truncated feature block: " + path.string());
  return m;
}

}  // namespace irl

#endif  // IRL_FEATURES_HPP
