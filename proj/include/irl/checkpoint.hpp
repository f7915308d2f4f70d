// include/irl/checkpoint.hpp

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

#ifndef IRL_CHECKPOINT_HPP
#define IRL_CHECKPOINT_HPP

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "irl/errors.hpp"
#include "irl/model.hpp"
#include "irl/util.hpp"

namespace irl {

// Versioned binary container: a string key/value section (config and
// trainer state) plus a named-tensor section (parameters, optimizer
// moments), all little-endian, f64 data. Writes are atomic
// (temp file + rename) so an interrupted run never leaves a torn file.

struct NamedTensor {
  std::string name;
  int r = 0, c = 0;
  std::vector<double> data;
};

struct Checkpoint {
  std::map<std::string, std::string> kv;
  std::vector<NamedTensor> tensors;

  const NamedTensor* find(const std::string& name) const {
    for (const auto& t : tensors) {
      if (t.name == name) return &t;
    }
    return nullptr;
  }

  bool has_key(const std::string& k) const { return kv.count(k) > 0; }

  const std::string& get(const std::string& k) const {
    auto it = kv.find(k);
    if (it == kv.end()) throw IncompatibleCheckpoint("missing key: " + k);
    return it->second;
  }
};

namespace detail {

inline void put_f64(std::string& s, double d) {
  uint64_t bits;
  std::memcpy(&bits, &d, 8);
  for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

struct Reader {
  const std::string& buf;
  size_t off = 0;

  void need(size_t n) const {
    if (off + n > buf.size()) throw IncompatibleCheckpoint("truncated checkpoint");
  }
  uint16_t u16() {
    need(2);
    uint16_t v = static_cast<uint16_t>(static_cast<unsigned char>(buf[off]) |
                                       (static_cast<unsigned char>(buf[off + 1]) << 8));
    off += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    }
    off += 4;
    return v;
  }
  double f64() {
    need(8);
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<uint64_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    }
    off += 8;
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }
  std::string bytes(size_t n) {
    need(n);
    std::string s = buf.substr(off, n);
    off += n;
    return s;
  }
};

}  // namespace detail

inline constexpr char kCheckpointMagic[9] = "IRLCKPT1";

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  std::string out;
  out.append(kCheckpointMagic, 8);
  detail::put_u32(out, 1);  // format version
  detail::put_u32(out, static_cast<uint32_t>(ck.kv.size()));
  for (const auto& [k, v] : ck.kv) {
    detail::put_u16(out, static_cast<uint16_t>(k.size()));
    out += k;
    detail::put_u32(out, static_cast<uint32_t>(v.size()));
    out += v;
  }
  detail::put_u32(out, static_cast<uint32_t>(ck.tensors.size()));
  for (const auto& t : ck.tensors) {
    detail::put_u16(out, static_cast<uint16_t>(t.name.size()));
    out += t.name;
    detail::put_u32(out, static_cast<uint32_t>(t.r));
    detail::put_u32(out, static_cast<uint32_t>(t.c));
    for (double d : t.data) detail::put_f64(out, d);
  }
  atomic_write_file(path, out);
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || buf.compare(0, 8, kCheckpointMagic) != 0) {
    throw IncompatibleCheckpoint("bad checkpoint magic: " + path.string());
  }
  detail::Reader r{buf, 8};
  const uint32_t version = r.u32();
  if (version != 1) {
    throw IncompatibleCheckpoint("unsupported checkpoint version " +
                                 std::to_string(version));
  }
  Checkpoint ck;
  const uint32_t n_kv = r.u32();
  for (uint32_t i = 0; i < n_kv; ++i) {
    std::string k = r.bytes(r.u16());
    std::string v = r.bytes(r.u32());
    ck.kv[k] = v;
  }
  const uint32_t n_tensors = r.u32();
  for (uint32_t i = 0; i < n_tensors; ++i) {
    NamedTensor t;
    t.name = r.bytes(r.u16());
    t.r = static_cast<int>(r.u32());
    t.c = static_cast<int>(r.u32());
    if (t.r < 0 || t.c < 0) throw IncompatibleCheckpoint("negative tensor shape");
    t.data.resize(static_cast<size_t>(t.r) * static_cast<size_t>(t.c));
    for (double& d : t.data) d = r.f64();
    ck.tensors.push_back(std::move(t));
  }
  return ck;
}

// Model parameters + config into a checkpoint.
inline Checkpoint checkpoint_from_model(const Seq2Seq& m) {
  Checkpoint ck;
  ck.kv["model.hidden"] = std::to_string(m.cfg.hidden);
  ck.kv["model.num_coeffs"] = std::to_string(m.cfg.num_coeffs);
  ck.kv["model.n_content"] = std::to_string(m.cfg.n_content);
  for (const auto& [name, t] : m.named_parameters()) {
    ck.tensors.push_back({name, t.rows(), t.cols(), t.data()});
  }
  return ck;
}

// Rebuilds a model from a checkpoint; every parameter must be present
// with the exact shape demanded by the stored config.
inline Seq2Seq model_from_checkpoint(const Checkpoint& ck) {
  ModelConfig cfg;
  cfg.hidden = std::stoi(ck.get("model.hidden"));
  cfg.num_coeffs = std::stoi(ck.get("model.num_coeffs"));
  cfg.n_content = std::stoi(ck.get("model.n_content"));
  Rng rng(0);  // placeholder values; every tensor is overwritten below
  Seq2Seq m = Seq2Seq::init(cfg, rng);
  for (auto& [name, t] : m.named_parameters()) {
    const NamedTensor* src = ck.find(name);
    if (!src) throw IncompatibleCheckpoint("missing tensor: " + name);
    if (src->r != t.rows() || src->c != t.cols()) {
      throw IncompatibleCheckpoint("shape mismatch for " + name);
    }
    t.data() = src->data;
  }
  return m;
}

}  // namespace irl

#endif  // IRL_CHECKPOINT_HPP
