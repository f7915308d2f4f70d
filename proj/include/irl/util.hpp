// include/irl/util.hpp

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

#ifndef IRL_UTIL_HPP
#define IRL_UTIL_HPP

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "irl/errors.hpp"

namespace irl {

inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

namespace detail {

// Little-endian byte packing shared by the binary file formats.
inline void put_u16(std::string& s, uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  s.append(b, 2);
}

inline void put_u32(std::string& s, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  s.append(b, 4);
}

inline uint16_t get_u16(const std::string& s, size_t off) {
  return static_cast<uint16_t>(static_cast<unsigned char>(s[off]) |
                               (static_cast<unsigned char>(s[off + 1]) << 8));
}

inline uint32_t get_u32(const std::string& s, size_t off) {
  return static_cast<uint32_t>(static_cast<unsigned char>(s[off])) |
         static_cast<uint32_t>(static_cast<unsigned char>(s[off + 1])) << 8 |
         static_cast<uint32_t>(static_cast<unsigned char>(s[off + 2])) << 16 |
         static_cast<uint32_t>(static_cast<unsigned char>(s[off + 3])) << 24;
}

}  // namespace detail

inline std::string hex64(uint64_t v) {
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[15 - i] = digits[(v >> (4 * i)) & 0xf];
  }
  buf[16] = '\0';
  return std::string(buf);
}

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + p.string());
  out << text;
  if (!out) throw IoError("write failed: " + p.string());
}

// Write to a sibling temp file, then rename. Readers never observe a
// partially written file.
inline void atomic_write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  write_text_file(tmp, bytes);
  std::filesystem::rename(tmp, p);
}

// Runs fn(i) for i in [0, n) over `workers` threads. Each index owns its
// output slot, so results are identical for any worker count.
inline void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  int k = static_cast<int>(std::min<size_t>(static_cast<size_t>(workers), n));
  pool.reserve(static_cast<size_t>(k));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(k));
  for (int t = 0; t < k; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[static_cast<size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline int default_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace irl

#endif  // IRL_UTIL_HPP
