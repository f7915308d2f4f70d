// include/irl/evalsuite.hpp

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

#ifndef IRL_EVALSUITE_HPP
#define IRL_EVALSUITE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "irl/corpus.hpp"
#include "irl/decode.hpp"
#include "irl/losses.hpp"
#include "irl/metrics.hpp"
#include "irl/model.hpp"
#include "irl/signal.hpp"

namespace irl {

// --- Shared featurization -------------------------------------------------
// The frontend freezes mean/variance statistics computed on the clean
// training split; every waveform (clean, noised, or otherwise degraded)
// is standardized with those same statistics.

struct Frontend {
  FeatureConfig fcfg;
};

inline Frontend make_frontend(const Corpus& corpus) {
  FeatureConfig raw;
  std::vector<FeatureMatrix> mats;
  for (const Utterance* u : corpus.split("train")) {
    mats.push_back(mfcc(u->audio, raw));
  }
  Frontend fe;
  fe.fcfg = raw;
  fe.fcfg.stats = std::make_shared<FeatureStats>(compute_feature_stats(mats));
  return fe;
}

inline FeatureMatrix features_of(const Frontend& fe, const Waveform& w) {
  return mfcc(w, fe.fcfg);
}

// Noise application for one spec: the bank track index comes from the
// spec, the subset eligible for drawing is the caller's business.
inline Waveform apply_noise(const Waveform& clean, const NoiseBank& bank,
                            const NoiseSpec& spec) {
  if (spec.noise_id < 0 || spec.noise_id >= static_cast<int>(bank.tracks.size())) {
    throw ConfigError("noise id outside bank");
  }
  return mix_at_snr(clean, bank.tracks[spec.noise_id].audio, spec);
}

// Beam length cap with headroom over the longest transcript.
inline int decode_cap(const Corpus& corpus) { return corpus.config.max_len + 4; }

// --- Distance profile -------------------------------------------------------

struct EvalPair {
  FeatureMatrix clean;
  FeatureMatrix noisy;
  std::vector<int> content;  // transcript token ids
};

struct DistanceProfile {
  std::vector<std::string> layers;  // enc, dec1..dec4, logits
  std::vector<double> l2;           // mean over pairs
  std::vector<double> cosine;       // mean over pairs
};

namespace detail {

// Cosine via a single square root so bitwise-identical inputs give
// exactly 1.0; zero-norm inputs compare equal-to-1 only when identical.
inline void pair_distance(const Tensor& a, const Tensor& b, double* l2,
                          double* cosine) {
  const std::vector<double>& x = a.data();
  const std::vector<double>& y = b.data();
  if (x.size() != y.size()) throw ShapeError("tap shape mismatch");
  double ssd = 0.0, sab = 0.0, ssa = 0.0, ssb = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    ssd += d * d;
    sab += x[i] * y[i];
    ssa += x[i] * x[i];
    ssb += y[i] * y[i];
  }
  *l2 = std::sqrt(ssd);
  const double denom = std::sqrt(ssa * ssb);
  if (denom == 0.0) {
    *cosine = (x == y) ? 1.0 : 0.0;
  } else {
    *cosine = std::min(1.0, std::max(-1.0, sab / denom));
  }
}

}  // namespace detail

// Mean per-layer L2 distance and cosine similarity between clean/noisy
// teacher-forced taps, layer order {enc, dec1..dec4, logits}.
inline DistanceProfile distance_profile(const Seq2Seq& m,
                                        const std::vector<EvalPair>& pairs) {
  if (pairs.empty()) throw ConfigError("distance profile needs pairs");
  NoGradGuard ng;
  const Vocab v = m.cfg.vocab();
  DistanceProfile out;
  out.layers = tap_names();
  out.l2.assign(out.layers.size(), 0.0);
  out.cosine.assign(out.layers.size(), 0.0);
  for (const EvalPair& p : pairs) {
    const std::vector<int> dec_in = decoder_inputs(v, p.content);
    auto fc = forward_teacher_forced(m, p.clean, dec_in, true);
    auto fn = forward_teacher_forced(m, p.noisy, dec_in, true);
    const std::vector<Tensor> ta = fc.taps.all();
    const std::vector<Tensor> tb = fn.taps.all();
    for (size_t l = 0; l < ta.size(); ++l) {
      double l2 = 0.0, cosine = 0.0;
      detail::pair_distance(ta[l], tb[l], &l2, &cosine);
      out.l2[l] += l2;
      out.cosine[l] += cosine;
    }
  }
  for (size_t l = 0; l < out.layers.size(); ++l) {
    out.l2[l] /= static_cast<double>(pairs.size());
    out.cosine[l] /= static_cast<double>(pairs.size());
  }
  return out;
}

// Held-out clean/noisy pairs for profiling: utterances from `split`
// mixed with training-bank noise at a fixed SNR, specs drawn from the
// evaluation seed namespace.
inline std::vector<EvalPair> make_eval_pairs(const Corpus& corpus,
                                             const Frontend& fe, int n_pairs,
                                             double snr_db, uint64_t eval_seed,
                                             const std::string& split = "test-clean") {
  std::vector<const Utterance*> utts = corpus.split(split);
  if (utts.empty()) throw ConfigError("corpus has no " + split + " split");
  std::vector<EvalPair> pairs;
  const int n = std::min<int>(n_pairs, static_cast<int>(utts.size()));
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(eval_seed, Stream::kEval, {7001ull, static_cast<uint64_t>(i)}));
    NoiseSpec spec = sample_noise_spec(rng, corpus.bank.num_train);
    spec.snr_db = snr_db;
    EvalPair p;
    p.clean = features_of(fe, utts[i]->audio);
    p.noisy = features_of(fe, apply_noise(utts[i]->audio, corpus.bank, spec));
    p.content = corpus.vocab.encode(utts[i]->transcript);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

inline std::string distance_profile_json(const DistanceProfile& p) {
  std::string out = "{";
  for (size_t l = 0; l < p.layers.size(); ++l) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s\"%s\":{\"l2\":%.9g,\"cosine\":%.9g}",
                  l ? "," : "", p.layers[l].c_str(), p.l2[l], p.cosine[l]);
    out += buf;
  }
  out += "}";
  return out;
}

// --- Scoring ----------------------------------------------------------------

// CER of a model over a fixed utterance list after applying `degrade`
// to each waveform (identity for the clean condition).
template <typename Degrade>
inline double scored_cer(const Seq2Seq& m, const Frontend& fe,
                         const std::vector<const Utterance*>& utts,
                         int beam_width, int max_len, Degrade&& degrade) {
  CerAccumulator acc;
  for (size_t i = 0; i < utts.size(); ++i) {
    Waveform w = degrade(utts[i]->audio, i);
    Hypothesis h = beam_search(m, features_of(fe, w), beam_width, max_len);
    acc.add(h.tokens, utts[i]->transcript);
  }
  return acc.value();
}

// Plain CER on a named split, no degradation.
inline double split_cer(const Seq2Seq& m, const Corpus& corpus,
                        const Frontend& fe, const std::string& split,
                        int beam_width = 10) {
  std::vector<const Utterance*> utts = corpus.split(split);
  if (utts.empty()) throw ConfigError("empty split: " + split);
  return scored_cer(m, fe, utts, beam_width, decode_cap(corpus),
                    [](const Waveform& w, size_t) { return w; });
}

// CER on a split with in-domain additive noise at a fixed SNR; specs are
// derived from the evaluation namespace so every model sees the same draws.
inline double noised_split_cer(const Seq2Seq& m, const Corpus& corpus,
                               const Frontend& fe, const std::string& split,
                               double snr_db, uint64_t eval_seed,
                               int beam_width = 10) {
  std::vector<const Utterance*> utts = corpus.split(split);
  if (utts.empty()) throw ConfigError("empty split: " + split);
  return scored_cer(m, fe, utts, beam_width, decode_cap(corpus),
                    [&](const Waveform& w, size_t i) {
                      Rng rng(derive_seed(eval_seed, Stream::kEval,
                                          {7002ull, static_cast<uint64_t>(i)}));
                      NoiseSpec spec = sample_noise_spec(rng, corpus.bank.num_train);
                      spec.snr_db = snr_db;
                      return apply_noise(w, corpus.bank, spec);
                    });
}

// Mean per-frame L2 norm of the encoder output over a split's clean
// inputs. The shrink ablation compares this across schemes: a model can
// halve the norm without gaining any robustness.
inline double mean_encoder_norm(const Seq2Seq& m, const Corpus& corpus,
                                const Frontend& fe, const std::string& split) {
  std::vector<const Utterance*> utts = corpus.split(split);
  if (utts.empty()) throw ConfigError("empty split: " + split);
  NoGradGuard ng;
  double sum = 0.0;
  long frames = 0;
  for (const Utterance* u : utts) {
    Tensor enc = encode(m, features_of(fe, u->audio));
    const int t_len = enc.rows();
    const int hidden = enc.cols();
    const std::vector<double>& d = enc.data();
    for (int t = 0; t < t_len; ++t) {
      double ss = 0.0;
      for (int j = 0; j < hidden; ++j) {
        const double x = d[static_cast<size_t>(t) * hidden + static_cast<size_t>(j)];
        ss += x * x;
      }
      sum += std::sqrt(ss);
      ++frames;
    }
  }
  return sum / static_cast<double>(frames);
}

// --- Out-of-domain suite ----------------------------------------------------

struct OodResult {
  std::vector<std::string> conditions;
  std::vector<double> cers;
};

namespace detail {

// Synthetic room impulse response: unit direct path plus a white-noise
// tail decaying 60 dB across rt60 seconds, truncated at rt60.
inline Waveform make_rir(double rt60_s, int rate, uint64_t seed) {
  Rng rng(seed);
  Waveform rir;
  rir.sample_rate = rate;
  const size_t n = static_cast<size_t>(std::lround(rt60_s * rate));
  rir.samples.assign(n, 0.0);
  rir.samples[0] = 1.0;
  const double decay = std::log(1000.0) / (rt60_s * rate);  // -60 dB at rt60
  for (size_t i = 1; i < n; ++i) {
    rir.samples[i] =
        0.5 * rng.normal() * std::exp(-decay * static_cast<double>(i));
  }
  return rir;
}

// The RIR may outlast a short utterance; convolution requires
// rir <= dry, so clip the tail to the dry length.
inline Waveform clip_rir(const Waveform& rir, size_t dry_len) {
  if (rir.size() <= dry_len) return rir;
  Waveform out;
  out.sample_rate = rir.sample_rate;
  out.samples.assign(rir.samples.begin(),
                     rir.samples.begin() + static_cast<long>(dry_len));
  return out;
}

}  // namespace detail

inline const std::vector<std::string>& ood_condition_names() {
  static const std::vector<std::string> names = {
      "clean",       "indomain-6db",  "indomain-12db", "rir-0.2s",
      "rir-0.5s",    "heldout-6db",   "heldout-12db",  "volume+6db",
      "volume-6db",  "telephony"};
  return names;
}

// CER per degradation condition over test-clean. All stochastic draws
// derive from (eval_seed, condition, utterance index) in the evaluation
// namespace, so different models face identical perturbations and no
// training-time noise seed is ever reused.
inline OodResult ood_suite(const Seq2Seq& m, const Corpus& corpus,
                           const Frontend& fe, uint64_t eval_seed,
                           int beam_width = 10) {
  std::vector<const Utterance*> utts = corpus.split("test-clean");
  if (utts.empty()) throw ConfigError("corpus has no test-clean split");
  const NoiseBank& bank = corpus.bank;
  const int n_heldout = static_cast<int>(bank.tracks.size()) - bank.num_train;
  if (n_heldout <= 0) throw ConfigError("noise bank has no held-out tracks");
  const int cap = decode_cap(corpus);
  const int rate = corpus.config.sample_rate;

  auto indomain = [&](double snr, uint64_t tag) {
    return [&, snr, tag](const Waveform& w, size_t i) {
      Rng rng(derive_seed(eval_seed, Stream::kEval, {tag, static_cast<uint64_t>(i)}));
      NoiseSpec spec = sample_noise_spec(rng, bank.num_train);
      spec.snr_db = snr;
      return apply_noise(w, bank, spec);
    };
  };
  auto heldout = [&](double snr, uint64_t tag) {
    return [&, snr, tag](const Waveform& w, size_t i) {
      Rng rng(derive_seed(eval_seed, Stream::kEval, {tag, static_cast<uint64_t>(i)}));
      NoiseSpec spec = sample_noise_spec(rng, n_heldout);
      spec.noise_id += bank.num_train;  // held-out tracks sit after training ones
      spec.snr_db = snr;
      return apply_noise(w, bank, spec);
    };
  };
  auto reverb = [&](double rt60, uint64_t tag) {
    Waveform rir = detail::make_rir(rt60, rate, derive_seed(eval_seed, Stream::kEval, {tag}));
    return [&, rir](const Waveform& w, size_t) {
      return convolve_rir(w, detail::clip_rir(rir, w.size()));
    };
  };

  OodResult out;
  out.conditions = ood_condition_names();
  out.cers.reserve(out.conditions.size());
  auto run = [&](auto&& degrade) {
    out.cers.push_back(scored_cer(m, fe, utts, beam_width, cap, degrade));
  };
  run([](const Waveform& w, size_t) { return w; });
  run(indomain(6.0, 101));
  run(indomain(12.0, 102));
  run(reverb(0.2, 103));
  run(reverb(0.5, 104));
  run(heldout(6.0, 105));
  run(heldout(12.0, 106));
  run([](const Waveform& w, size_t) { return scale_volume(w, 6.0); });
  run([](const Waveform& w, size_t) { return scale_volume(w, -6.0); });
  run([&](const Waveform& w, size_t) {
    return resample(resample(w, 8000), rate);
  });
  return out;
}

// --- Emission ---------------------------------------------------------------

// Table-2-style matrix: one row per condition, one column per model.
inline std::string ood_tsv(const std::vector<std::string>& model_names,
                           const std::vector<OodResult>& results) {
  if (model_names.size() != results.size()) throw ConfigError("tsv: column mismatch");
  std::string out = "condition";
  for (const std::string& n : model_names) out += "\t" + n;
  out += "\n";
  if (results.empty()) return out;
  const std::vector<std::string>& conds = results[0].conditions;
  for (const OodResult& r : results) {
    if (r.conditions != conds) throw ConfigError("tsv: condition mismatch");
  }
  for (size_t c = 0; c < conds.size(); ++c) {
    out += conds[c];
    for (const OodResult& r : results) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "\t%.4f", r.cers[c]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

inline std::string ood_jsonl(const std::vector<std::string>& model_names,
                             const std::vector<OodResult>& results) {
  if (model_names.size() != results.size()) throw ConfigError("jsonl: size mismatch");
  std::string out;
  for (size_t mi = 0; mi < results.size(); ++mi) {
    for (size_t c = 0; c < results[mi].conditions.size(); ++c) {
      char buf[256];
      std::snprintf(buf, sizeof(buf),
                    "{\"model\":\"%s\",\"condition\":\"%s\",\"cer\":%.6f}\n",
                    model_names[mi].c_str(), results[mi].conditions[c].c_str(),
                    results[mi].cers[c]);
      out += buf;
    }
  }
  return out;
}

}  // namespace irl

#endif  // IRL_EVALSUITE_HPP
