// include/irl/signal.hpp

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

#ifndef IRL_SIGNAL_HPP
#define IRL_SIGNAL_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "irl/errors.hpp"
#include "irl/fft.hpp"
#include "irl/rng.hpp"
#include "irl/wave.hpp"

namespace irl {

// Parameters of one stochastic noising draw: how loud, where in the
// noise track to start, and which bank entry to use.
struct NoiseSpec {
  double snr_db = 0.0;
  double shift_ms = 0.0;
  int noise_id = 0;
};

inline double measure_snr_db(const Waveform& signal, const Waveform& noise) {
  if (signal.size() != noise.size()) throw DegenerateSignal("snr: length mismatch");
  if (signal.sample_rate != noise.sample_rate) throw DegenerateSignal("snr: rate mismatch");
  double ps = mean_power(signal);
  double pn = mean_power(noise);
  if (ps <= 0.0) throw DegenerateSignal("snr: zero-power signal");
  if (pn <= 0.0) throw DegenerateSignal("snr: zero-power noise");
  return 10.0 * std::log10(ps / pn);
}

// Circularly offsets into `noise` by shift_ms and tiles cyclically to
// `out_len` samples.
inline std::vector<double> shift_and_tile(const Waveform& noise, double shift_ms,
                                          size_t out_len) {
  if (noise.samples.empty()) throw DegenerateSignal("empty noise track");
  size_t n = noise.samples.size();
  size_t shift = static_cast<size_t>(
      std::llround(shift_ms / 1000.0 * noise.sample_rate)) % n;
  std::vector<double> out(out_len);
  size_t j = shift;
  for (size_t i = 0; i < out_len; ++i) {
    out[i] = noise.samples[j];
    if (++j == n) j = 0;
  }
  return out;
}

// clean + a·noise′ with a chosen so the result sits at spec.snr_db.
// noise′ is the shifted, tiled noise track.
inline Waveform mix_at_snr(const Waveform& clean, const Waveform& noise,
                           const NoiseSpec& spec) {
  if (clean.sample_rate != noise.sample_rate) throw DegenerateSignal("mix: rate mismatch");
  if (clean.samples.empty()) throw DegenerateSignal("mix: empty clean");
  std::vector<double> tiled = shift_and_tile(noise, spec.shift_ms, clean.size());
  double p_clean = mean_power(clean);
  double p_noise = 0.0;
  for (double s : tiled) p_noise += s * s;
  p_noise /= static_cast<double>(tiled.size());
  if (p_clean <= 0.0) throw DegenerateSignal("mix: zero-power clean");
  if (p_noise <= 0.0) throw DegenerateSignal("mix: zero-power noise");
  double a = std::sqrt(p_clean / (p_noise * std::pow(10.0, spec.snr_db / 10.0)));
  Waveform out;
  out.sample_rate = clean.sample_rate;
  out.samples.resize(clean.size());
  for (size_t i = 0; i < clean.size(); ++i) {
    out.samples[i] = clean.samples[i] + a * tiled[i];
  }
  return out;
}

// Draw order is part of the determinism contract: snr, then shift,
// then bank index.
inline NoiseSpec sample_noise_spec(Rng& rng, int bank_size) {
  NoiseSpec spec;
  spec.snr_db = rng.normal(12.0, 8.0);
  spec.shift_ms = rng.uniform(0.0, 1000.0);
  spec.noise_id = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(bank_size)));
  return spec;
}

// Full linear convolution truncated to dry length, peak-normalized to
// the dry signal's peak so reverberation changes shape, not level.
inline Waveform convolve_rir(const Waveform& dry, const Waveform& rir) {
  if (rir.samples.empty()) throw DegenerateSignal("empty rir");
  if (dry.samples.empty()) throw DegenerateSignal("empty dry");
  if (rir.size() > dry.size()) throw TooShort("rir longer than dry signal");
  std::vector<double> full = fft_convolve(dry.samples, rir.samples);
  Waveform out;
  out.sample_rate = dry.sample_rate;
  out.samples.assign(full.begin(), full.begin() + static_cast<long>(dry.size()));
  double p_dry = peak(dry);
  double p_wet = peak(out);
  if (p_wet <= 0.0) throw DegenerateSignal("rir output has zero peak");
  double g = p_dry / p_wet;
  for (double& s : out.samples) s *= g;
  return out;
}

inline Waveform scale_volume(const Waveform& w, double gain_db) {
  if (!std::isfinite(gain_db)) throw NumericError("non-finite gain");
  double g = std::pow(10.0, gain_db / 20.0);
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(w.size());
  for (size_t i = 0; i < w.size(); ++i) out.samples[i] = w.samples[i] * g;
  return out;
}

// Band-limited windowed-sinc resampler. The anti-alias cutoff is 0.45
// of the lower of the two rates (0.9 of the narrower Nyquist), which
// passes a 2 kHz tone through a 16k->8k->16k round trip while
// attenuating content above the 8 kHz band edge.
inline Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) throw DegenerateSignal("resample: nonpositive rate");
  if (target_rate == w.sample_rate) return w;
  const double src_rate = static_cast<double>(w.sample_rate);
  const double fc = 0.45 * std::min(src_rate, static_cast<double>(target_rate));
  const int zero_crossings = 16;  // sinc half-width, in cutoff periods
  const double half_width_s = zero_crossings / (2.0 * fc);
  const double gain = 2.0 * fc / src_rate;

  Waveform out;
  out.sample_rate = target_rate;
  size_t n_out = static_cast<size_t>(
      std::llround(static_cast<double>(w.size()) * target_rate / src_rate));
  out.samples.assign(n_out, 0.0);
  const long n_src = static_cast<long>(w.size());
  for (size_t j = 0; j < n_out; ++j) {
    const double t = static_cast<double>(j) / target_rate;
    long i_lo = static_cast<long>(std::ceil((t - half_width_s) * src_rate));
    long i_hi = static_cast<long>(std::floor((t + half_width_s) * src_rate));
    i_lo = std::max(i_lo, 0L);
    i_hi = std::min(i_hi, n_src - 1);
    double acc = 0.0;
    for (long i = i_lo; i <= i_hi; ++i) {
      const double dt = t - static_cast<double>(i) / src_rate;
      const double x = 2.0 * fc * dt;  // sinc argument, in zero crossings
      double sinc = 1.0;
      if (x != 0.0) sinc = std::sin(M_PI * x) / (M_PI * x);
      // Blackman window over the kernel support.
      const double u = 0.5 * (dt / half_width_s + 1.0);  // 0..1 across support
      const double win = 0.42 - 0.5 * std::cos(2.0 * M_PI * u) +
                         0.08 * std::cos(4.0 * M_PI * u);
      acc += w.samples[static_cast<size_t>(i)] * sinc * win;
    }
    out.samples[j] = gain * acc;
  }
  return out;
}

}  // namespace irl

#endif  // IRL_SIGNAL_HPP
