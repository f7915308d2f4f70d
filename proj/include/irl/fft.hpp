// include/irl/fft.hpp

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

#ifndef IRL_FFT_HPP
#define IRL_FFT_HPP

#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "irl/errors.hpp"

namespace irl {

// Iterative radix-2 Cooley-Tukey, power-of-two sizes only. Twiddles are
// cached per thread; callers in worker pools never share the cache.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false) {
  const size_t n = a.size();
  if (n == 0) return;
  if (n & (n - 1)) throw ShapeError("fft size must be a power of two");

  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  struct Twiddles {
    std::map<size_t, std::vector<std::complex<double>>> fwd, inv;
  };
  thread_local Twiddles cache;
  auto& table = inverse ? cache.inv : cache.fwd;
  auto it = table.find(n);
  if (it == table.end()) {
    std::vector<std::complex<double>> tw(n / 2);
    double sign = inverse ? 1.0 : -1.0;
    for (size_t k = 0; k < n / 2; ++k) {
      double ang = sign * 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
      tw[k] = {std::cos(ang), std::sin(ang)};
    }
    it = table.emplace(n, std::move(tw)).first;
  }
  const auto& tw = it->second;

  for (size_t len = 2; len <= n; len <<= 1) {
    size_t stride = n / len;
    for (size_t i = 0; i < n; i += len) {
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * tw[k * stride];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    double scale = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= scale;
  }
}

inline size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Full linear convolution via zero-padded FFT, length n + m - 1.
inline std::vector<double> fft_convolve(const std::vector<double>& x,
                                        const std::vector<double>& h) {
  if (x.empty() || h.empty()) return {};
  size_t out_len = x.size() + h.size() - 1;
  size_t n = next_pow2(out_len);
  std::vector<std::complex<double>> fa(n), fb(n);
  for (size_t i = 0; i < x.size(); ++i) fa[i] = x[i];
  for (size_t i = 0; i < h.size(); ++i) fb[i] = h[i];
  fft_inplace(fa);
  fft_inplace(fb);
  for (size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  fft_inplace(fa, /*inverse=*/true);
  std::vector<double> out(out_len);
  for (size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
  return out;
}

}  // namespace irl

#endif  // IRL_FFT_HPP
