// include/irl/train.hpp

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

#ifndef IRL_TRAIN_HPP
#define IRL_TRAIN_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irl/checkpoint.hpp"
#include "irl/evalsuite.hpp"
#include "irl/losses.hpp"
#include "irl/optim.hpp"
#include "irl/util.hpp"

namespace irl {

struct TrainConfig {
  TrainScheme scheme = TrainScheme::make(SchemeKind::kBaseline);
  ModelConfig model;
  uint64_t seed = 17;       // root seed, shared with corpus synthesis
  int seed_index = 0;       // repetition index within the seed protocol
  AdamConfig adam;          // lr 0.001, clip 5.0
  int max_epochs = 40;
  int patience = 3;         // non-improving epochs against the running best
  int profile_pairs = 10;   // dev pairs profiled per epoch for the log
  double profile_snr_db = 6.0;
  uint64_t eval_seed = 1234;  // evaluation-namespace seed for profiles
  int val_beam_width = 1;     // greedy is enough for per-epoch tracking
};

// Canonical config text; its hash guards checkpoint/eval compatibility.
// The epoch cap and patience are deliberately absent: they decide when
// to stop, never what any completed epoch computed, so raising the cap
// may resume an earlier run's checkpoints.
inline std::string train_config_text(const TrainConfig& c) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "scheme=%s alpha=%.17g gamma=%.17g lambda=%.17g aux=%.17g "
                "hidden=%d coeffs=%d content=%d seed=%llu seed_index=%d "
                "lr=%.17g clip=%.17g eval_seed=%llu profile_pairs=%d "
                "profile_snr=%.17g val_beam=%d",
                c.scheme.name().c_str(), c.scheme.alpha, c.scheme.gamma,
                c.scheme.lambda, c.scheme.aux_weight, c.model.hidden,
                c.model.num_coeffs, c.model.n_content,
                static_cast<unsigned long long>(c.seed), c.seed_index,
                c.adam.lr, c.adam.clip_norm,
                static_cast<unsigned long long>(c.eval_seed), c.profile_pairs,
                c.profile_snr_db, c.val_beam_width);
  return buf;
}

inline uint64_t train_config_hash(const TrainConfig& c) {
  return fnv1a64(train_config_text(c));
}

// The run seed deliberately ignores the scheme so schemes sharing a
// (seed, seed_index) face identical initialization, shuffles, and noise
// draws; scheme comparisons are then paired.
inline uint64_t run_seed_of(const TrainConfig& c) {
  return derive_seed(c.seed, Stream::kRun, {static_cast<uint64_t>(c.seed_index)});
}

// --- Schedule ---------------------------------------------------------------

struct ScheduleDecision {
  bool halve = false;
  bool stop = false;
};

// NewBob-style rule over completed validation perplexities (oldest
// first): halve when the last epoch is worse than the one before it;
// stop after `patience` consecutive epochs that failed to improve on
// the running best seen before each of them.
inline ScheduleDecision schedule_update(const std::vector<double>& ppls,
                                        int patience = 3) {
  if (ppls.empty()) throw ConfigError("schedule needs a completed epoch");
  ScheduleDecision d;
  const size_t n = ppls.size();
  if (n >= 2 && ppls[n - 1] > ppls[n - 2]) d.halve = true;
  double best = std::numeric_limits<double>::infinity();
  int since_improve = 0;
  for (double p : ppls) {
    if (p < best) {
      best = p;
      since_improve = 0;
    } else {
      ++since_improve;
    }
  }
  if (since_improve >= patience) d.stop = true;
  return d;
}

// --- Train log --------------------------------------------------------------

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_ppl = 0.0;
  double val_cer = 0.0;
  double lr = 0.0;
  double wall_time_s = 0.0;
  std::vector<double> layer_l2;
  std::vector<double> layer_cosine;
};

struct TrainLog {
  std::vector<EpochRecord> records;
};

namespace detail {

inline std::string json_array(const std::vector<double>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%.9g", i ? "," : "", v[i]);
    out += buf;
  }
  return out + "]";
}

}  // namespace detail

// Deterministic portion of one record: everything except wall time.
// Wall time is appended only in the on-disk log line, so checkpoint
// bytes and metric comparisons never depend on machine speed.
inline std::string epoch_record_canonical(const EpochRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "{\"epoch\":%d,\"train_loss\":%.12g,\"val_ppl\":%.12g,"
                "\"val_cer\":%.12g,\"lr\":%.12g,\"layer_l2\":",
                r.epoch, r.train_loss, r.val_ppl, r.val_cer, r.lr);
  return std::string(buf) + detail::json_array(r.layer_l2) +
         ",\"layer_cosine\":" + detail::json_array(r.layer_cosine) + "}";
}

inline std::string jsonl_from_canonical(const std::string& canonical,
                                        double wall_time_s) {
  std::string line = canonical;
  char buf[64];
  std::snprintf(buf, sizeof(buf), ",\"wall_time_s\":%.3f}", wall_time_s);
  line.replace(line.size() - 1, 1, buf);
  return line;
}

inline std::string epoch_record_jsonl(const EpochRecord& r) {
  return jsonl_from_canonical(epoch_record_canonical(r), r.wall_time_s);
}

inline std::string train_log_jsonl(const TrainLog& log) {
  std::string out;
  for (const EpochRecord& r : log.records) out += epoch_record_jsonl(r) + "\n";
  return out;
}

// --- Training ---------------------------------------------------------------

struct TrainResult {
  Seq2Seq model;
  std::optional<Discriminator> disc;  // adversarial runs only
  TrainLog log;
  std::vector<double> ppl_history;
  int epochs = 0;
  int seed_index = 0;
  double final_dev_other_cer = 0.0;  // beam width 10 on dev-other
  bool resumed = false;
};

namespace detail {

struct PreparedUtterance {
  const Utterance* utt = nullptr;
  FeatureMatrix clean;
  std::vector<int> dec_in;
  std::vector<int> labels;
  std::vector<int> content;
};

inline std::vector<PreparedUtterance> prepare_split(const Corpus& corpus,
                                                    const Frontend& fe,
                                                    const std::string& split) {
  std::vector<PreparedUtterance> out;
  const Vocab& v = corpus.vocab;
  for (const Utterance* u : corpus.split(split)) {
    PreparedUtterance p;
    p.utt = u;
    p.clean = features_of(fe, u->audio);
    p.content = v.encode(u->transcript);
    p.dec_in = decoder_inputs(v, p.content);
    p.labels = decoder_labels(v, p.content);
    out.push_back(std::move(p));
  }
  return out;
}

// Sum of token cross-entropies and token count over a prepared split.
inline void split_ce(const Seq2Seq& m,
                     const std::vector<PreparedUtterance>& utts, double* ce_sum,
                     long* n_tokens) {
  NoGradGuard ng;
  for (const PreparedUtterance& p : utts) {
    ForwardResult fr = forward_teacher_forced(m, p.clean, p.dec_in, false);
    *ce_sum += cross_entropy(fr.logits, p.labels).value();
    *n_tokens += static_cast<long>(p.labels.size());
  }
}

inline double split_beam_cer(const Seq2Seq& m,
                             const std::vector<PreparedUtterance>& utts,
                             int beam_width, int max_len) {
  CerAccumulator acc;
  for (const PreparedUtterance& p : utts) {
    Hypothesis h = beam_search(m, p.clean, beam_width, max_len);
    acc.add(h.tokens, p.utt->transcript);
  }
  return acc.value();
}

inline std::string ckpt_name(int epoch) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ckpt-epoch-%03d.bin", epoch);
  return buf;
}

inline void overwrite_named_from(const Checkpoint& ck,
                                 std::vector<std::pair<std::string, Tensor>> named) {
  for (auto& [name, t] : named) {
    const NamedTensor* src = ck.find(name);
    if (!src) throw IncompatibleCheckpoint("missing tensor " + name);
    if (src->data.size() != t.numel()) {
      throw IncompatibleCheckpoint("shape mismatch for " + name);
    }
    t.data() = src->data;
  }
}

}  // namespace detail

// Trains one model under one scheme. If `outdir` is nonempty, writes a
// checkpoint per epoch plus trainlog.jsonl and manifest.json there and
// resumes from the newest epoch checkpoint found; the directory must
// already exist. Every random draw derives from (run seed, stream,
// epoch, utterance), so a resumed run retraces the interrupted one.
inline TrainResult train(const Corpus& corpus, const Frontend& fe,
                         const TrainConfig& cfg,
                         const std::filesystem::path& outdir = {}) {
  const uint64_t run_seed = run_seed_of(cfg);
  const uint64_t cfg_hash = train_config_hash(cfg);
  if (cfg.model.n_content != corpus.config.n_content) {
    throw ConfigError("model and corpus disagree on content size");
  }

  TrainResult res;
  res.seed_index = cfg.seed_index;
  {
    Rng init_rng(derive_seed(run_seed, Stream::kInit));
    res.model = Seq2Seq::init(cfg.model, init_rng);
  }
  const bool adversarial = cfg.scheme.kind == SchemeKind::kAdversarial;
  if (adversarial) {
    Rng disc_rng(derive_seed(run_seed, Stream::kDisc));
    res.disc = Discriminator::init(cfg.model.hidden, disc_rng);
  }
  std::vector<std::pair<std::string, Tensor>> named = res.model.named_parameters();
  if (adversarial) {
    for (auto& nv : res.disc->named_parameters()) named.push_back(nv);
  }
  Adam adam = Adam::init(std::move(named), cfg.adam);

  std::vector<detail::PreparedUtterance> train_set =
      detail::prepare_split(corpus, fe, "train");
  if (train_set.empty()) throw ConfigError("corpus has no train split");
  std::vector<detail::PreparedUtterance> dev_clean =
      detail::prepare_split(corpus, fe, "dev-clean");
  std::vector<detail::PreparedUtterance> dev_other =
      detail::prepare_split(corpus, fe, "dev-other");
  std::vector<EvalPair> profile_pairs =
      make_eval_pairs(corpus, fe, cfg.profile_pairs, cfg.profile_snr_db,
                      cfg.eval_seed, "dev-other");
  const int cap = decode_cap(corpus);

  int start_epoch = 0;  // completed epochs
  std::vector<std::string> stored_lines;

  // Resume from the newest complete checkpoint, if any.
  if (!outdir.empty()) {
    if (!std::filesystem::is_directory(outdir)) {
      throw PathError("training directory does not exist: " + outdir.string());
    }
    int newest = 0;
    for (int e = 1; e <= cfg.max_epochs; ++e) {
      if (std::filesystem::exists(outdir / detail::ckpt_name(e))) newest = e;
    }
    if (newest > 0) {
      Checkpoint ck = load_checkpoint(outdir / detail::ckpt_name(newest));
      if (ck.get("config_hash") != hex64(cfg_hash)) {
        throw IncompatibleCheckpoint("checkpoint belongs to a different config");
      }
      detail::overwrite_named_from(ck, res.model.named_parameters());
      if (adversarial) {
        detail::overwrite_named_from(ck, res.disc->named_parameters());
      }
      adam.load_from(ck);
      const std::string hist = ck.get("ppl_history");
      for (size_t pos = 0; pos < hist.size();) {
        size_t next = hist.find(',', pos);
        if (next == std::string::npos) next = hist.size();
        res.ppl_history.push_back(std::stod(hist.substr(pos, next - pos)));
        pos = next + 1;
      }
      for (int e = 1; e <= newest; ++e) {
        char key[16];
        std::snprintf(key, sizeof(key), "log.%03d", e);
        stored_lines.push_back(ck.get(key));
      }
      start_epoch = newest;
      res.resumed = true;
      res.epochs = newest;  // loop below may be a no-op if the cap is met
    }
  }

  for (int epoch = start_epoch + 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const double epoch_lr = adam.cfg.lr;

    std::vector<size_t> order(train_set.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    {
      Rng shuffle_rng(derive_seed(run_seed, Stream::kShuffle,
                                  {static_cast<uint64_t>(epoch)}));
      for (size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<size_t>(
                                    shuffle_rng.uniform_int(static_cast<int>(i)))]);
      }
    }

    double loss_sum = 0.0;
    for (size_t idx : order) {
      const detail::PreparedUtterance& p = train_set[idx];
      FeatureMatrix noisy;
      const FeatureMatrix* noisy_ptr = nullptr;
      if (cfg.scheme.uses_noisy()) {
        // Fresh spec per (run, epoch, utterance), never cached.
        Rng noise_rng(derive_seed(
            derive_seed(run_seed, Stream::kNoise, {static_cast<uint64_t>(epoch)}),
            Stream::kNoise, p.utt->id));
        NoiseSpec spec = sample_noise_spec(noise_rng, corpus.bank.num_train);
        noisy = features_of(fe, apply_noise(p.utt->audio, corpus.bank, spec));
        noisy_ptr = &noisy;
      }
      LossBundle bundle =
          scheme_loss(res.model, cfg.scheme, p.clean, noisy_ptr, p.dec_in,
                      p.labels, adversarial ? &*res.disc : nullptr);
      // The discriminator loss joins the task loss in one backward pass:
      // shared encoder nodes must be traversed exactly once.
      Tensor total = adversarial ? add(bundle.task, bundle.disc) : bundle.task;
      adam.zero_grad();
      backward(total);
      adam.step();
      release_graph(total);
      loss_sum += bundle.task_value;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());
    rec.lr = epoch_lr;
    {
      double ce = 0.0;
      long toks = 0;
      detail::split_ce(res.model, dev_clean, &ce, &toks);
      detail::split_ce(res.model, dev_other, &ce, &toks);
      rec.val_ppl = std::exp(ce / static_cast<double>(toks));
      CerAccumulator acc;
      for (const auto* set : {&dev_clean, &dev_other}) {
        for (const detail::PreparedUtterance& p : *set) {
          Hypothesis h = beam_search(res.model, p.clean, cfg.val_beam_width, cap);
          acc.add(h.tokens, p.utt->transcript);
        }
      }
      rec.val_cer = acc.value();
    }
    {
      DistanceProfile prof = distance_profile(res.model, profile_pairs);
      rec.layer_l2 = prof.l2;
      rec.layer_cosine = prof.cosine;
    }
    res.ppl_history.push_back(rec.val_ppl);
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    res.log.records.push_back(rec);
    stored_lines.push_back(epoch_record_canonical(rec));

    ScheduleDecision d = schedule_update(res.ppl_history, cfg.patience);

    if (!outdir.empty()) {
      Checkpoint ck = checkpoint_from_model(res.model);
      if (adversarial) {
        for (auto& [name, t] : res.disc->named_parameters()) {
          ck.tensors.push_back({name, t.rows(), t.cols(), t.data()});
        }
      }
      adam.save_into(ck);
      ck.kv["scheme"] = cfg.scheme.name();
      ck.kv["epoch"] = std::to_string(epoch);
      ck.kv["config_hash"] = hex64(cfg_hash);
      ck.kv["run_seed"] = std::to_string(run_seed);
      ck.kv["seed_index"] = std::to_string(cfg.seed_index);
      ck.kv["corpus_hash"] = hex64(manifest_hash(corpus));
      {
        std::string hist;
        for (size_t i = 0; i < res.ppl_history.size(); ++i) {
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%s%.17g", i ? "," : "",
                        res.ppl_history[i]);
          hist += buf;
        }
        ck.kv["ppl_history"] = hist;
      }
      for (size_t i = 0; i < stored_lines.size(); ++i) {
        char key[16];
        std::snprintf(key, sizeof(key), "log.%03d", static_cast<int>(i) + 1);
        ck.kv[key] = stored_lines[i];
      }
      save_checkpoint(outdir / detail::ckpt_name(epoch), ck);
      // Pre-resume epochs come back from the checkpoint without wall
      // times; they are rewritten with a zero placeholder.
      std::string log_text;
      for (size_t e = 0; e < stored_lines.size(); ++e) {
        const int rec_idx = static_cast<int>(e) - start_epoch;
        log_text +=
            (rec_idx < 0
                 ? jsonl_from_canonical(stored_lines[e], 0.0)
                 : epoch_record_jsonl(res.log.records[static_cast<size_t>(rec_idx)])) +
            "\n";
      }
      atomic_write_file(outdir / "trainlog.jsonl", log_text);
      std::string manifest = "{\"scheme\":\"" + std::string(cfg.scheme.name()) +
                             "\",\"seed\":" + std::to_string(cfg.seed) +
                             ",\"seed_index\":" + std::to_string(cfg.seed_index) +
                             ",\"run_seed\":" + std::to_string(run_seed) +
                             ",\"config_hash\":\"" + hex64(cfg_hash) +
                             "\",\"corpus_hash\":\"" +
                             hex64(manifest_hash(corpus)) + "\"}\n";
      atomic_write_file(outdir / "manifest.json", manifest);
    }

    res.epochs = epoch;
    if (d.stop) break;
    if (d.halve) adam.cfg.lr *= 0.5;
  }

  res.final_dev_other_cer =
      detail::split_beam_cer(res.model, dev_other, 10, cap);
  return res;
}

// --- Seed repetition and grid search -----------------------------------------

// Paper-style repetition: train `n_seeds` replicas (seed_index 0..n-1)
// and keep the one with the best dev-other CER.
inline TrainResult best_of_seeds(const Corpus& corpus, const Frontend& fe,
                                 TrainConfig cfg, int n_seeds,
                                 const std::filesystem::path& outdir = {},
                                 int workers = 1) {
  if (n_seeds < 1) throw ConfigError("need at least one seed");
  std::vector<TrainResult> results(static_cast<size_t>(n_seeds));
  parallel_for(static_cast<size_t>(n_seeds), workers, [&](size_t i) {
    TrainConfig c = cfg;
    c.seed_index = static_cast<int>(i);
    std::filesystem::path dir;
    if (!outdir.empty()) {
      dir = outdir / ("seed-" + std::to_string(i));
      std::filesystem::create_directories(dir);
    }
    results[i] = train(corpus, fe, c, dir);
  });
  size_t best = 0;
  for (size_t i = 1; i < results.size(); ++i) {
    if (results[i].final_dev_other_cer < results[best].final_dev_other_cer) {
      best = i;
    }
  }
  return std::move(results[best]);
}

struct GridTrial {
  TrainScheme scheme;
  double dev_other_cer = 0.0;
};

struct GridResult {
  TrainScheme best;
  double best_cer = 0.0;
  std::vector<GridTrial> trials;
};

namespace detail {

// Penalty weights the grid sweeps for each scheme, with their names.
inline std::vector<std::pair<const char*, double TrainScheme::*>>
grid_coordinates(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kIrlE:
    case SchemeKind::kIrlC:
    case SchemeKind::kLogitPairing:
      return {{"gamma", &TrainScheme::gamma}, {"lambda", &TrainScheme::lambda}};
    case SchemeKind::kAdversarial:
    case SchemeKind::kWeightDecay:
    case SchemeKind::kActShrink:
      return {{"aux", &TrainScheme::aux_weight}};
    default:
      return {};
  }
}

inline double tie_break_key(const TrainScheme& s) {
  return s.gamma + s.lambda + s.aux_weight;
}

}  // namespace detail

// One-at-a-time coordinate search over the scheme's penalty weights,
// selected by dev-other CER; ties go to the smaller combined weight.
// Baseline and DataAug have no weights to sweep, so the grid degenerates
// to the base configuration. Trials within one coordinate pass run in
// parallel; directories are named by coordinate and value so an
// interrupted search resumes its finished trials.
inline GridResult grid_search(const Corpus& corpus, const Frontend& fe,
                              TrainConfig base,
                              std::vector<double> grid = {0.001, 0.01, 0.1, 1.0,
                                                          10.0, 100.0},
                              const std::filesystem::path& outdir = {},
                              int workers = 1) {
  if (grid.empty()) throw ConfigError("empty grid");
  GridResult out;
  out.best = base.scheme;

  auto run_trial = [&](const TrainScheme& s, const std::string& tag) {
    TrainConfig cfg = base;
    cfg.scheme = s;
    std::filesystem::path dir;
    if (!outdir.empty()) {
      dir = outdir / ("trial-" + tag);
      std::filesystem::create_directories(dir);
    }
    return train(corpus, fe, cfg, dir).final_dev_other_cer;
  };

  out.best_cer = run_trial(out.best, "base");
  out.trials.push_back({out.best, out.best_cer});

  for (auto [coord_name, coord] : detail::grid_coordinates(base.scheme.kind)) {
    const TrainScheme start = out.best;
    std::vector<TrainScheme> probes;
    for (double value : grid) {
      TrainScheme s = start;
      s.*coord = value;
      if (value != start.*coord) probes.push_back(s);
    }
    std::vector<double> cers(probes.size(), 0.0);
    parallel_for(probes.size(), workers, [&](size_t k) {
      char tag[64];
      std::snprintf(tag, sizeof(tag), "%s-%g", coord_name, probes[k].*coord);
      cers[k] = run_trial(probes[k], tag);
    });
    for (size_t k = 0; k < probes.size(); ++k) {
      out.trials.push_back({probes[k], cers[k]});
      const bool better =
          cers[k] < out.best_cer ||
          (cers[k] == out.best_cer &&
           detail::tie_break_key(probes[k]) < detail::tie_break_key(out.best));
      if (better) {
        out.best = probes[k];
        out.best_cer = cers[k];
      }
    }
  }
  return out;
}

}  // namespace irl

#endif  // IRL_TRAIN_HPP
