// include/irl/wave.hpp

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

#ifndef IRL_WAVE_HPP
#define IRL_WAVE_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "irl/errors.hpp"
#include "irl/util.hpp"

namespace irl {

// Mono PCM audio. Samples are dimensionless amplitudes, nominally in
// [-1, 1]; processing never clips, so intermediate values may exceed
// that range.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

inline double mean_power(const Waveform& w) {
  if (w.samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : w.samples) acc += s * s;
  return acc / static_cast<double>(w.samples.size());
}

inline double rms(const Waveform& w) { return std::sqrt(mean_power(w)); }

inline double peak(const Waveform& w) {
  double p = 0.0;
  for (double s : w.samples) p = std::max(p, std::fabs(s));
  return p;
}

inline void check_finite(const Waveform& w, const char* what) {
  for (double s : w.samples) {
    if (!std::isfinite(s)) throw NumericError(std::string("non-finite sample in ") + what);
  }
}

// Quantizes to the 16-bit grid used on disk, so in-memory corpora and
// WAV round trips are sample-identical.
inline Waveform quantize16(const Waveform& w) {
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i) {
    double v = std::nearbyint(w.samples[i] * 32768.0);
    v = std::min(32767.0, std::max(-32768.0, v));
    out.samples[i] = v / 32768.0;
  }
  return out;
}

// 16-bit mono PCM RIFF writer. Values are clamped to the int16 range;
// internal floats are normalized by 1/32768.
inline void write_wav(const std::filesystem::path& path, const Waveform& w) {
  std::string bytes;
  const uint32_t n = static_cast<uint32_t>(w.samples.size());
  const uint32_t data_bytes = n * 2;
  bytes.reserve(44 + data_bytes);
  bytes += "RIFF";
  detail::put_u32(bytes, 36 + data_bytes);
  bytes += "WAVEfmt ";
  detail::put_u32(bytes, 16);
  detail::put_u16(bytes, 1);  // PCM
  detail::put_u16(bytes, 1);  // mono
  detail::put_u32(bytes, static_cast<uint32_t>(w.sample_rate));
  detail::put_u32(bytes, static_cast<uint32_t>(w.sample_rate) * 2);
  detail::put_u16(bytes, 2);
  detail::put_u16(bytes, 16);
  bytes += "data";
  detail::put_u32(bytes, data_bytes);
  for (uint32_t i = 0; i < n; ++i) {
    double v = std::nearbyint(w.samples[i] * 32768.0);
    v = std::min(32767.0, std::max(-32768.0, v));
    int16_t s = static_cast<int16_t>(v);
    detail::put_u16(bytes, static_cast<uint16_t>(s));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
    throw IoError("not a RIFF/WAVE file: " + path.string());
  }
  Waveform w;
  bool have_fmt = false, have_data = false;
  size_t off = 12;
  while (off + 8 <= bytes.size()) {
    std::string id = bytes.substr(off, 4);
    uint32_t sz = detail::get_u32(bytes, off + 4);
    size_t body = off + 8;
    if (body + sz > bytes.size()) throw IoError("truncated chunk in " + path.string());
    if (id == "fmt ") {
      if (sz < 16) throw IoError("short fmt chunk in " + path.string());
      uint16_t format = detail::get_u16(bytes, body);
      uint16_t channels = detail::get_u16(bytes, body + 2);
      uint32_t rate = detail::get_u32(bytes, body + 4);
      uint16_t bits = detail::get_u16(bytes, body + 14);
      if (format != 1 || channels != 1 || bits != 16) {
        throw IoError("expected 16-bit mono PCM: " + path.string());
      }
      w.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (id == "data") {
      w.samples.resize(sz / 2);
      for (size_t i = 0; i < w.samples.size(); ++i) {
        int16_t s = static_cast<int16_t>(detail::get_u16(bytes, body + 2 * i));
        w.samples[i] = static_cast<double>(s) / 32768.0;
      }
      have_data = true;
    }
    off = body + sz + (sz & 1);  // chunks are word-aligned
  }
  if (!have_fmt || !have_data) throw IoError("missing fmt/data chunk: " + path.string());
  return w;
}

}  // namespace irl

#endif  // IRL_WAVE_HPP
