// include/irl/corpus.hpp

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

#ifndef IRL_CORPUS_HPP
#define IRL_CORPUS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "irl/errors.hpp"
#include "irl/rng.hpp"
#include "irl/util.hpp"
#include "irl/vocab.hpp"
#include "irl/wave.hpp"

namespace irl {

// Deterministic synthetic corpus: each character is a short chirp with
// a character-specific base frequency, so utterances carry real
// time-frequency structure for the MFCC front end while the whole
// dataset stays a pure function of one seed.

inline const std::array<const char*, 5>& split_names() {
  static const std::array<const char*, 5> names = {
      "train", "dev-clean", "dev-other", "test-clean", "test-other"};
  return names;
}

struct Utterance {
  std::string id;
  std::string split;
  std::string speaker_id;
  Waveform audio;
  std::string transcript;
};

enum class NoiseCategory { kTonal, kBandNoise, kSpeechLike };

inline const char* category_name(NoiseCategory c) {
  switch (c) {
    case NoiseCategory::kTonal: return "tonal";
    case NoiseCategory::kBandNoise: return "band-noise";
    case NoiseCategory::kSpeechLike: return "speech-like";
  }
  return "?";
}

struct NoiseTrack {
  std::string name;
  Waveform audio;
  NoiseCategory category = NoiseCategory::kTonal;
  bool held_out = false;
};

// Tracks are ordered training-eligible first; ids >= num_train are the
// held-out speech-like tracks reserved for out-of-domain evaluation.
struct NoiseBank {
  std::vector<NoiseTrack> tracks;
  int num_train = 0;
};

struct CorpusConfig {
  uint64_t seed = 17;
  int n_train = 500;
  int n_dev_clean = 50;
  int n_dev_other = 50;
  int n_test_clean = 50;
  int n_test_other = 50;
  int n_content = 12;
  int min_len = 5;
  int max_len = 20;
  int spk_train = 20;
  int spk_other = 5;          // speakers per non-train split
  double jitter_clean = 0.03; // speaker log-frequency/rate sigma, clean splits
  double jitter_other = 0.11; // same, "-other" splits
  double gain_std_db = 4.0;   // per-utterance level jitter
  int sample_rate = 16000;
  int n_tonal = 12;
  int n_band = 12;
  int n_babble = 12;   // training speech-like tracks (offset frequency map)
  int n_heldout = 12;  // held-out speech-like tracks (true frequency map)
};

struct Corpus {
  CorpusConfig config;
  Vocab vocab;
  std::vector<Utterance> utterances;
  NoiseBank bank;

  std::vector<const Utterance*> split(const std::string& name) const {
    std::vector<const Utterance*> out;
    for (const auto& u : utterances) {
      if (u.split == name) out.push_back(&u);
    }
    return out;
  }
};

// Character chirp base frequency; adjacent characters sit 220 Hz apart
// so dominant peaks are separable even under speaker jitter.
inline double char_base_freq(int char_id) { return 400.0 + 220.0 * char_id; }

// Voice of one speaker: a deterministic function of the id string and
// the jitter amplitude of the speaker's split group.
struct SpeakerProfile {
  double freq_factor = 1.0;
  double rate_factor = 1.0;
};

inline SpeakerProfile speaker_profile(const std::string& speaker_id, double jitter) {
  Rng rng(derive_seed(fnv1a64(speaker_id), Stream::kCorpus));
  SpeakerProfile p;
  p.freq_factor = std::exp(rng.normal(0.0, jitter));
  p.rate_factor = std::exp(rng.normal(0.0, 0.5 * jitter));
  return p;
}

namespace detail {

// Renders one sequence of chirp slots into `out`. Each slot sweeps
// ±4% around its frequency with a second harmonic, and slots blend
// through 20 ms raised-cosine cross-fades centered on slot boundaries.
inline void render_chirps(std::vector<double>& out, const std::vector<double>& freqs,
                          double slot_s, int rate, double amp) {
  const double fade_s = 0.010;  // half the 20 ms cross-fade
  const size_t n = out.size();
  const long fade = std::lround(fade_s * rate);
  for (size_t k = 0; k < freqs.size(); ++k) {
    const double f = freqs[k];
    const long start = std::lround(static_cast<double>(k) * slot_s * rate);
    const long end = std::lround(static_cast<double>(k + 1) * slot_s * rate);
    const long lo = std::max(0L, start - fade);
    const long hi = std::min(static_cast<long>(n), end + fade);
    for (long i = lo; i < hi; ++i) {
      const double t = static_cast<double>(i - start) / rate;
      // Linear sweep 0.96f -> 1.04f across the slot; phase is its integral.
      const double phase = 2.0 * M_PI * f * (0.96 * t + 0.04 * t * t / slot_s);
      double env = 1.0;
      if (i < start + fade) {
        const double u = static_cast<double>(i - (start - fade)) / (2.0 * fade);
        env = 0.5 - 0.5 * std::cos(M_PI * u);
      } else if (i >= end - fade) {
        const double u = static_cast<double>(i - (end - fade)) / (2.0 * fade);
        env = 0.5 + 0.5 * std::cos(M_PI * u);
      }
      out[static_cast<size_t>(i)] +=
          env * (amp * std::sin(phase) + 0.4 * amp * std::sin(2.0 * phase));
    }
  }
}

}  // namespace detail

// Renders a transcript as concatenated character chirps. The speaker id
// fixes the voice (frequency and rate factors); the rng supplies only
// per-utterance variation (level jitter), so the frequency track is a
// pure function of (transcript, speaker).
inline Utterance synth_utterance(const std::string& transcript,
                                 const std::string& speaker_id, Rng& rng,
                                 const Vocab& vocab, double jitter = 0.03,
                                 double gain_std_db = 4.0, int rate = 16000) {
  if (transcript.empty()) throw VocabError("empty transcript");
  SpeakerProfile prof = speaker_profile(speaker_id, jitter);
  const double slot_s = 0.080 * prof.rate_factor;
  std::vector<double> freqs;
  freqs.reserve(transcript.size());
  for (char c : transcript) {
    freqs.push_back(char_base_freq(vocab.id_of(c)) * prof.freq_factor);
  }
  Utterance u;
  u.transcript = transcript;
  u.speaker_id = speaker_id;
  u.audio.sample_rate = rate;
  const size_t n =
      static_cast<size_t>(std::lround(transcript.size() * slot_s * rate));
  u.audio.samples.assign(n, 0.0);
  detail::render_chirps(u.audio.samples, freqs, slot_s, rate, 0.25);
  double gain_db = rng.normal(0.0, gain_std_db);
  gain_db = std::min(9.0, std::max(-9.0, gain_db));
  const double g = std::pow(10.0, gain_db / 20.0);
  for (double& s : u.audio.samples) s *= g;
  u.audio = quantize16(u.audio);
  return u;
}

namespace detail {

inline Waveform make_tonal_track(Rng& rng, int rate) {
  Waveform w;
  w.sample_rate = rate;
  const double dur = rng.uniform(1.2, 3.0);
  const double f = rng.uniform(250.0, 3500.0);
  const double am_rate = rng.uniform(0.5, 3.0);
  const double phase0 = rng.uniform(0.0, 2.0 * M_PI);
  w.samples.resize(static_cast<size_t>(dur * rate));
  for (size_t i = 0; i < w.samples.size(); ++i) {
    const double t = static_cast<double>(i) / rate;
    const double am = 1.0 + 0.2 * std::sin(2.0 * M_PI * am_rate * t);
    w.samples[i] = 0.3 * am * std::sin(2.0 * M_PI * f * t + phase0);
  }
  return w;
}

// Band-limited noise as a dense sum of random-phase sinusoids inside
// the band; Gaussian-like by the central limit theorem.
inline Waveform make_band_track(Rng& rng, int rate) {
  Waveform w;
  w.sample_rate = rate;
  const double dur = rng.uniform(1.2, 3.0);
  const double lo = rng.uniform(200.0, 3000.0);
  const double width = rng.uniform(400.0, 2000.0);
  const int n_sines = 120;
  std::vector<double> freq(n_sines), phase(n_sines);
  for (int k = 0; k < n_sines; ++k) {
    freq[k] = rng.uniform(lo, lo + width);
    phase[k] = rng.uniform(0.0, 2.0 * M_PI);
  }
  w.samples.assign(static_cast<size_t>(dur * rate), 0.0);
  for (size_t i = 0; i < w.samples.size(); ++i) {
    const double t = static_cast<double>(i) / rate;
    double acc = 0.0;
    for (int k = 0; k < n_sines; ++k) {
      acc += std::sin(2.0 * M_PI * freq[k] * t + phase[k]);
    }
    w.samples[i] = acc;
  }
  double r = rms(w);
  for (double& s : w.samples) s *= 0.15 / r;
  return w;
}

// Speech-like babble: random chirp "syllables". Training tracks use a
// frequency map offset half a character step from the corpus map;
// held-out tracks use the true map, making them the hardest (and
// OOD-only) interference.
inline Waveform make_babble_track(Rng& rng, int rate, int n_content, bool true_map) {
  Waveform w;
  w.sample_rate = rate;
  const double dur = rng.uniform(1.5, 3.0);
  const double slot_s = rng.uniform(0.06, 0.12);
  const int n_slots = static_cast<int>(dur / slot_s) + 1;
  std::vector<double> freqs(n_slots);
  const double offset = true_map ? 0.0 : 110.0;
  for (int k = 0; k < n_slots; ++k) {
    freqs[k] = char_base_freq(rng.uniform_int(n_content)) + offset;
  }
  w.samples.assign(static_cast<size_t>(dur * rate), 0.0);
  render_chirps(w.samples, freqs, slot_s, rate, 0.3);
  return w;
}

}  // namespace detail

inline NoiseBank build_noise_bank(const CorpusConfig& cfg) {
  NoiseBank bank;
  Rng root(derive_seed(cfg.seed, Stream::kCorpus, {~0ull}));
  auto add = [&](const std::string& name, Waveform w, NoiseCategory cat, bool held) {
    bank.tracks.push_back({name, quantize16(w), cat, held});
  };
  for (int i = 0; i < cfg.n_tonal; ++i) {
    Rng rng = root.fork(Stream::kCorpus, {1, static_cast<uint64_t>(i)});
    add("tonal-" + std::to_string(i), detail::make_tonal_track(rng, cfg.sample_rate),
        NoiseCategory::kTonal, false);
  }
  for (int i = 0; i < cfg.n_band; ++i) {
    Rng rng = root.fork(Stream::kCorpus, {2, static_cast<uint64_t>(i)});
    add("band-" + std::to_string(i), detail::make_band_track(rng, cfg.sample_rate),
        NoiseCategory::kBandNoise, false);
  }
  for (int i = 0; i < cfg.n_babble; ++i) {
    Rng rng = root.fork(Stream::kCorpus, {3, static_cast<uint64_t>(i)});
    add("babble-" + std::to_string(i),
        detail::make_babble_track(rng, cfg.sample_rate, cfg.n_content, false),
        NoiseCategory::kSpeechLike, false);
  }
  bank.num_train = static_cast<int>(bank.tracks.size());
  for (int i = 0; i < cfg.n_heldout; ++i) {
    Rng rng = root.fork(Stream::kCorpus, {4, static_cast<uint64_t>(i)});
    add("heldout-" + std::to_string(i),
        detail::make_babble_track(rng, cfg.sample_rate, cfg.n_content, true),
        NoiseCategory::kSpeechLike, true);
  }
  return bank;
}

inline Corpus build_corpus(const CorpusConfig& cfg) {
  Corpus corpus;
  corpus.config = cfg;
  corpus.vocab = Vocab::make(cfg.n_content);
  const int counts[5] = {cfg.n_train, cfg.n_dev_clean, cfg.n_dev_other,
                         cfg.n_test_clean, cfg.n_test_other};
  for (int s = 0; s < 5; ++s) {
    const std::string split = split_names()[s];
    const bool other = split.size() > 5 && split.substr(split.size() - 5) == "other";
    const double jitter = other ? cfg.jitter_other : cfg.jitter_clean;
    const int n_spk = (s == 0) ? cfg.spk_train : cfg.spk_other;
    for (int i = 0; i < counts[s]; ++i) {
      Rng rng(derive_seed(cfg.seed, Stream::kCorpus,
                          {static_cast<uint64_t>(s), static_cast<uint64_t>(i)}));
      const int len = cfg.min_len + rng.uniform_int(cfg.max_len - cfg.min_len + 1);
      std::string transcript;
      for (int k = 0; k < len; ++k) {
        transcript += corpus.vocab.char_of(rng.uniform_int(cfg.n_content));
      }
      const std::string speaker =
          "spk-" + split + "-" + std::to_string(rng.uniform_int(n_spk));
      Utterance u = synth_utterance(transcript, speaker, rng, corpus.vocab, jitter,
                                    cfg.gain_std_db, cfg.sample_rate);
      char idbuf[32];
      std::snprintf(idbuf, sizeof(idbuf), "%s_%04d", split.c_str(), i);
      u.id = idbuf;
      u.split = split;
      corpus.utterances.push_back(std::move(u));
    }
  }
  corpus.bank = build_noise_bank(cfg);
  return corpus;
}

// Manifest text: one tab-separated record per utterance. The wav_path
// column is where `synth` writes the file, relative to the corpus dir.
inline std::string manifest_text(const Corpus& corpus) {
  std::string out;
  for (const auto& u : corpus.utterances) {
    out += u.id;
    out += '\t';
    out += u.split;
    out += '\t';
    out += u.speaker_id;
    out += '\t';
    out += "wav/" + u.id + ".wav";
    out += '\t';
    out += u.transcript;
    out += '\n';
  }
  return out;
}

inline uint64_t manifest_hash(const Corpus& corpus) {
  return fnv1a64(manifest_text(corpus));
}

}  // namespace irl

#endif  // IRL_CORPUS_HPP
