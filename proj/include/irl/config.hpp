// include/irl/config.hpp

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

#ifndef IRL_CONFIG_HPP
#define IRL_CONFIG_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "irl/corpus.hpp"
#include "irl/errors.hpp"
#include "irl/train.hpp"
#include "irl/util.hpp"

namespace irl {

inline SchemeKind scheme_kind_from_name(const std::string& name) {
  if (name == "baseline") return SchemeKind::kBaseline;
  if (name == "data_aug") return SchemeKind::kDataAug;
  if (name == "logit_pairing") return SchemeKind::kLogitPairing;
  if (name == "irl_e") return SchemeKind::kIrlE;
  if (name == "irl_c") return SchemeKind::kIrlC;
  if (name == "adversarial") return SchemeKind::kAdversarial;
  if (name == "weight_decay") return SchemeKind::kWeightDecay;
  if (name == "act_shrink") return SchemeKind::kActShrink;
  throw ConfigError("unknown scheme: " + name);
}

inline const std::vector<std::string>& all_scheme_names() {
  static const std::vector<std::string> names = {
      "baseline",    "data_aug",     "logit_pairing", "irl_e",
      "irl_c",       "adversarial",  "weight_decay",  "act_shrink"};
  return names;
}

// One experiment config: a flat key = value file. Values stay strings
// until a typed view asks for them, so serialization round-trips the
// exact text. "auto" on the penalty weights defers to the scheme's own
// defaults.
class RunConfig {
 public:
  static RunConfig defaults() {
    RunConfig rc;
    static const std::pair<const char*, const char*> registry[] = {
        // corpus
        {"seed", "17"},
        {"n_train", "500"},
        {"n_dev_clean", "50"},
        {"n_dev_other", "50"},
        {"n_test_clean", "50"},
        {"n_test_other", "50"},
        {"n_content", "12"},
        {"min_len", "5"},
        {"max_len", "20"},
        {"spk_train", "20"},
        {"spk_other", "5"},
        {"jitter_clean", "0.03"},
        {"jitter_other", "0.11"},
        {"gain_std_db", "4"},
        {"sample_rate", "16000"},
        {"n_tonal", "12"},
        {"n_band", "12"},
        {"n_babble", "12"},
        {"n_heldout", "12"},
        // model
        {"hidden", "32"},
        {"num_coeffs", "13"},
        // training
        {"scheme", "baseline"},
        {"alpha", "1"},
        {"gamma", "auto"},
        {"lambda", "auto"},
        {"aux_weight", "auto"},
        {"lr", "0.001"},
        {"clip_norm", "5"},
        {"max_epochs", "40"},
        {"patience", "3"},
        {"seeds", "3"},
        {"profile_pairs", "10"},
        {"profile_snr_db", "6"},
        {"eval_seed", "1234"},
        {"val_beam_width", "1"},
        // evaluation / search
        {"beam_width", "10"},
        {"snr_db", "6"},
        {"profile_count", "50"},
        {"grid", "0.001,0.01,0.1,1,10,100"},
        // plumbing; empty/0 fall back to the environment, then builtins
        {"outdir", ""},
        {"workers", "0"},
    };
    for (const auto& [k, v] : registry) rc.kv_.emplace_back(k, v);
    return rc;
  }

  // Parses a config file over the current values. Lines are
  // `key = value`; `#` starts a comment; blank lines are skipped.
  void load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.good()) throw PathError("cannot read config: " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const size_t eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          " is not key = value: " + trimmed);
      }
      set(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
    }
  }

  // Assigns one key; unknown keys are refused so typos fail loudly.
  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : kv_) {
      if (k == key) {
        v = value;
        return;
      }
    }
    throw ConfigError("unknown config key: " + key);
  }

  const std::string& get(const std::string& key) const {
    for (const auto& [k, v] : kv_) {
      if (k == key) return v;
    }
    throw ConfigError("unknown config key: " + key);
  }

  double get_num(const std::string& key) const {
    const std::string& v = get(key);
    size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " is not a number: " + v);
    }
    if (used != v.size()) {
      throw ConfigError("config key " + key + " is not a number: " + v);
    }
    return x;
  }

  long long get_int(const std::string& key) const {
    const double x = get_num(key);
    const long long i = static_cast<long long>(x);
    if (static_cast<double>(i) != x) {
      throw ConfigError("config key " + key + " is not an integer: " + get(key));
    }
    return i;
  }

  // Canonical text: registry order, one `key = value` per line. Feeding
  // it back through load_file reproduces the config exactly.
  std::string serialize() const {
    std::string out;
    for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
    return out;
  }

  uint64_t hash() const { return fnv1a64(serialize()); }

  CorpusConfig corpus_config() const {
    CorpusConfig c;
    c.seed = static_cast<uint64_t>(get_int("seed"));
    c.n_train = static_cast<int>(get_int("n_train"));
    c.n_dev_clean = static_cast<int>(get_int("n_dev_clean"));
    c.n_dev_other = static_cast<int>(get_int("n_dev_other"));
    c.n_test_clean = static_cast<int>(get_int("n_test_clean"));
    c.n_test_other = static_cast<int>(get_int("n_test_other"));
    c.n_content = static_cast<int>(get_int("n_content"));
    c.min_len = static_cast<int>(get_int("min_len"));
    c.max_len = static_cast<int>(get_int("max_len"));
    c.spk_train = static_cast<int>(get_int("spk_train"));
    c.spk_other = static_cast<int>(get_int("spk_other"));
    c.jitter_clean = get_num("jitter_clean");
    c.jitter_other = get_num("jitter_other");
    c.gain_std_db = get_num("gain_std_db");
    c.sample_rate = static_cast<int>(get_int("sample_rate"));
    c.n_tonal = static_cast<int>(get_int("n_tonal"));
    c.n_band = static_cast<int>(get_int("n_band"));
    c.n_babble = static_cast<int>(get_int("n_babble"));
    c.n_heldout = static_cast<int>(get_int("n_heldout"));
    return c;
  }

  ModelConfig model_config() const {
    ModelConfig m;
    m.hidden = static_cast<int>(get_int("hidden"));
    m.num_coeffs = static_cast<int>(get_int("num_coeffs"));
    m.n_content = static_cast<int>(get_int("n_content"));
    return m;
  }

  TrainScheme scheme() const {
    TrainScheme s = TrainScheme::make(scheme_kind_from_name(get("scheme")));
    s.alpha = get_num("alpha");
    if (get("gamma") != "auto") s.gamma = get_num("gamma");
    if (get("lambda") != "auto") s.lambda = get_num("lambda");
    if (get("aux_weight") != "auto") s.aux_weight = get_num("aux_weight");
    return s;
  }

  TrainConfig train_config() const {
    TrainConfig t;
    t.scheme = scheme();
    t.model = model_config();
    t.seed = static_cast<uint64_t>(get_int("seed"));
    t.adam.lr = get_num("lr");
    t.adam.clip_norm = get_num("clip_norm");
    t.max_epochs = static_cast<int>(get_int("max_epochs"));
    t.patience = static_cast<int>(get_int("patience"));
    t.profile_pairs = static_cast<int>(get_int("profile_pairs"));
    t.profile_snr_db = get_num("profile_snr_db");
    t.eval_seed = static_cast<uint64_t>(get_int("eval_seed"));
    t.val_beam_width = static_cast<int>(get_int("val_beam_width"));
    return t;
  }

  std::vector<double> grid_values() const {
    std::vector<double> out;
    const std::string& text = get("grid");
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t next = text.find(',', pos);
      if (next == std::string::npos) next = text.size();
      const std::string item = trim(text.substr(pos, next - pos));
      if (!item.empty()) {
        size_t used = 0;
        double x = 0.0;
        try {
          x = std::stod(item, &used);
        } catch (const std::exception&) {
          used = std::string::npos;
        }
        if (used != item.size()) {
          throw ConfigError("grid entry is not a number: " + item);
        }
        out.push_back(x);
      }
      pos = next + 1;
    }
    if (out.empty()) throw ConfigError("empty grid");
    return out;
  }

  // Environment supplies only these two defaults, per the interface
  // contract: the output directory and the worker count.
  std::filesystem::path resolved_outdir() const {
    const std::string& v = get("outdir");
    if (!v.empty()) return v;
    if (const char* env = std::getenv("IRLKIT_OUTDIR")) {
      if (*env) return env;
    }
    return "runs";
  }

  int resolved_workers() const {
    long long w = get_int("workers");
    if (w == 0) {
      if (const char* env = std::getenv("IRLKIT_WORKERS")) {
        try {
          w = std::stoll(env);
        } catch (const std::exception&) {
          throw ConfigError(std::string("IRLKIT_WORKERS is not a number: ") + env);
        }
      }
    }
    if (w == 0) w = 1;
    if (w < 1) throw ConfigError("workers must be positive");
    return static_cast<int>(w);
  }

 private:
  RunConfig() = default;  // all instances start from defaults()

  static std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::vector<std::pair<std::string, std::string>> kv_;
};

}  // namespace irl

#endif  // IRL_CONFIG_HPP
