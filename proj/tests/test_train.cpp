// tests/test_train.cpp

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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "irl/train.hpp"

namespace fs = std::filesystem;

namespace {

// Small corpus + frontend shared across the trainer tests.
struct Tiny {
  irl::Corpus corpus;
  irl::Frontend fe;
  irl::ModelConfig mc;

  static const Tiny& get() {
    static Tiny t = make();
    return t;
  }

  static Tiny make() {
    irl::CorpusConfig cc;
    cc.n_train = 12;
    cc.n_dev_clean = 4;
    cc.n_dev_other = 4;
    cc.n_test_clean = 4;
    cc.n_test_other = 4;
    cc.n_content = 4;
    cc.min_len = 3;
    cc.max_len = 6;
    cc.spk_train = 4;
    cc.spk_other = 2;
    cc.n_tonal = 2;
    cc.n_band = 2;
    cc.n_babble = 2;
    cc.n_heldout = 2;
    irl::ModelConfig mc;
    mc.hidden = 8;
    mc.n_content = 4;
    irl::Corpus corpus = irl::build_corpus(cc);
    irl::Frontend fe = irl::make_frontend(corpus);
    return Tiny{std::move(corpus), std::move(fe), mc};
  }
};

irl::TrainConfig tiny_cfg(irl::SchemeKind kind, int epochs) {
  irl::TrainConfig cfg;
  cfg.scheme = irl::TrainScheme::make(kind);
  cfg.model = Tiny::get().mc;
  cfg.max_epochs = epochs;
  cfg.profile_pairs = 2;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

// Log line with its wall-time suffix removed; everything before it must
// be machine-independent.
std::string strip_wall(const std::string& line) {
  const size_t pos = line.find(",\"wall_time_s\":");
  REQUIRE(pos != std::string::npos);
  return line.substr(0, pos);
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

// --- Adam --------------------------------------------------------------------

TEST_CASE("adam leaves parameters alone on a zero gradient", "[train]") {
  const std::vector<double> before = {1.0, -2.0, 0.5, 3.0};
  auto p = irl::Tensor::leaf({2, 2}, before, true);
  irl::Adam adam = irl::Adam::init({{"p", p}});
  adam.zero_grad();
  adam.step();
  REQUIRE(p.data() == before);
  REQUIRE(adam.step_count() == 1);
}

TEST_CASE("adam's first step has learning-rate magnitude", "[train]") {
  irl::AdamConfig cfg;
  cfg.lr = 0.05;

  auto p = irl::Tensor::leaf({1, 1}, {1.0}, true);
  irl::Adam adam = irl::Adam::init({{"w", p}}, cfg);
  adam.zero_grad();
  p.grad()[0] = 0.5;
  adam.step();
  // m-hat = g, v-hat = g^2, so the first move is lr * g / (|g| + eps).
  REQUIRE(p.data()[0] == Catch::Approx(1.0 - cfg.lr).epsilon(1e-6));

  auto q = irl::Tensor::leaf({1, 1}, {1.0}, true);
  irl::Adam b = irl::Adam::init({{"w", q}}, cfg);
  b.zero_grad();
  q.grad()[0] = -2.0;
  b.step();
  REQUIRE(q.data()[0] == Catch::Approx(1.0 + cfg.lr).epsilon(1e-6));
}

TEST_CASE("adam rejects non-finite gradients before touching anything", "[train]") {
  auto p = irl::Tensor::leaf({2, 1}, {1.0, 2.0}, true);
  auto q = irl::Tensor::leaf({1, 1}, {3.0}, true);
  irl::Adam adam = irl::Adam::init({{"p", p}, {"q", q}});

  adam.zero_grad();
  p.grad()[1] = std::numeric_limits<double>::quiet_NaN();
  q.grad()[0] = 1.0;
  REQUIRE_THROWS_AS(adam.step(), irl::NumericError);
  REQUIRE(p.data() == std::vector<double>{1.0, 2.0});
  REQUIRE(q.data() == std::vector<double>{3.0});
  REQUIRE(adam.step_count() == 0);

  adam.zero_grad();
  p.grad()[1] = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_AS(adam.step(), irl::NumericError);
  REQUIRE(adam.step_count() == 0);

  // A clean step afterwards works; the failed attempts left no trace.
  adam.zero_grad();
  p.grad() = {0.1, 0.1};
  q.grad() = {0.1};
  adam.step();
  REQUIRE(adam.step_count() == 1);
  REQUIRE(p.data()[0] < 1.0);
}

TEST_CASE("clipping rescales the global gradient exactly", "[train]") {
  // Adam's first step is scale-free per element, so clipping only shows
  // once gradients of different norms mix in the moments: step twice.
  auto run = [](double clip, std::vector<double> g1) {
    auto p = irl::Tensor::leaf({2, 1}, {1.0, 1.0}, true);
    irl::AdamConfig cfg;
    cfg.clip_norm = clip;
    irl::Adam adam = irl::Adam::init({{"w", p}}, cfg);
    adam.zero_grad();
    p.grad() = g1;
    adam.step();
    adam.zero_grad();
    p.grad() = {1.0, 0.0};
    adam.step();
    return p.data();
  };
  // Norm 10 against ceiling 5 halves the gradient, bit for bit the same
  // as feeding the halved gradient with clipping off.
  REQUIRE(run(5.0, {6.0, 8.0}) == run(0.0, {3.0, 4.0}));
  REQUIRE(run(5.0, {6.0, 8.0}) != run(0.0, {6.0, 8.0}));
}

TEST_CASE("grad_norm sums over every parameter", "[train]") {
  auto p = irl::Tensor::leaf({2, 1}, {0.0, 0.0}, true);
  auto q = irl::Tensor::leaf({1, 1}, {0.0}, true);
  irl::Adam adam = irl::Adam::init({{"p", p}, {"q", q}});
  REQUIRE(adam.grad_norm() == 0.0);  // unallocated gradients count as zero
  adam.zero_grad();
  p.grad() = {6.0, 8.0};
  q.grad() = {std::sqrt(21.0)};
  REQUIRE(adam.grad_norm() == Catch::Approx(11.0).epsilon(1e-12));
}

TEST_CASE("adam state survives a checkpoint round trip", "[train]") {
  irl::Rng rng(irl::derive_seed(7, irl::Stream::kTest));
  std::vector<std::vector<double>> gs(5, std::vector<double>(3));
  for (auto& g : gs)
    for (double& x : g) x = rng.normal(0.0, 1.0);

  auto p = irl::Tensor::leaf({3, 1}, {0.2, -0.4, 1.0}, true);
  irl::Adam a = irl::Adam::init({{"w", p}});
  for (int k = 0; k < 3; ++k) {
    a.zero_grad();
    p.grad() = gs[static_cast<size_t>(k)];
    a.step();
  }

  irl::Checkpoint ck;
  a.save_into(ck);
  auto q = irl::Tensor::leaf({3, 1}, p.data(), true);
  irl::Adam b = irl::Adam::init({{"w", q}});
  b.load_from(ck);
  REQUIRE(b.step_count() == 3);

  for (int k = 3; k < 5; ++k) {
    a.zero_grad();
    p.grad() = gs[static_cast<size_t>(k)];
    a.step();
    b.zero_grad();
    q.grad() = gs[static_cast<size_t>(k)];
    b.step();
  }
  REQUIRE(p.data() == q.data());
}

// --- Schedule ----------------------------------------------------------------

TEST_CASE("newbob halves on regression and stops on stagnation", "[train]") {
  auto d = irl::schedule_update({10.0, 9.0, 8.0});
  REQUIRE_FALSE(d.halve);
  REQUIRE_FALSE(d.stop);

  d = irl::schedule_update({10.0, 11.0});
  REQUIRE(d.halve);
  REQUIRE_FALSE(d.stop);

  d = irl::schedule_update({10.0, 10.0, 10.0, 10.0});
  REQUIRE_FALSE(d.halve);  // equal is stagnant, not worse
  REQUIRE(d.stop);         // three epochs without a new best

  d = irl::schedule_update({10.0, 9.0, 9.0, 9.0, 9.0});
  REQUIRE(d.stop);

  d = irl::schedule_update({10.0, 11.0, 8.0, 12.0, 13.0});
  REQUIRE(d.halve);
  REQUIRE_FALSE(d.stop);  // only two epochs since the best at 8

  d = irl::schedule_update({10.0, 10.0, 10.0}, 2);
  REQUIRE(d.stop);

  REQUIRE_THROWS_AS(irl::schedule_update({}), irl::ConfigError);
}

// --- Log formatting ----------------------------------------------------------

TEST_CASE("canonical log lines exclude wall time", "[train]") {
  irl::EpochRecord r;
  r.epoch = 3;
  r.train_loss = 1.5;
  r.val_ppl = 4.25;
  r.val_cer = 0.5;
  r.lr = 0.001;
  r.layer_l2 = {0.1, 0.2};
  r.layer_cosine = {0.9, 0.8};

  r.wall_time_s = 1.0;
  const std::string c1 = irl::epoch_record_canonical(r);
  r.wall_time_s = 99.0;
  REQUIRE(irl::epoch_record_canonical(r) == c1);
  REQUIRE(c1.find("wall_time_s") == std::string::npos);

  const std::string line = irl::epoch_record_jsonl(r);
  REQUIRE(line == irl::jsonl_from_canonical(c1, 99.0));
  REQUIRE(line.find("\"wall_time_s\":99.000}") != std::string::npos);
  REQUIRE(line.find("\"epoch\":3,") == 1);
}

TEST_CASE("config hash guards the trajectory, not the stopping rule", "[train]") {
  irl::TrainConfig a = tiny_cfg(irl::SchemeKind::kIrlE, 3);
  irl::TrainConfig b = a;
  b.max_epochs = 7;
  b.patience = 1;
  REQUIRE(irl::train_config_hash(a) == irl::train_config_hash(b));

  b = a;
  b.scheme.gamma = 0.5;
  REQUIRE(irl::train_config_hash(a) != irl::train_config_hash(b));
  b = a;
  b.adam.lr = 0.01;
  REQUIRE(irl::train_config_hash(a) != irl::train_config_hash(b));

  // The run seed pairs schemes: it changes with the repetition index only.
  irl::TrainConfig c = tiny_cfg(irl::SchemeKind::kBaseline, 3);
  REQUIRE(irl::run_seed_of(a) == irl::run_seed_of(c));
  c.seed_index = 1;
  REQUIRE(irl::run_seed_of(a) != irl::run_seed_of(c));
}

// --- Training runs -----------------------------------------------------------

TEST_CASE("baseline training loss falls over the first three epochs", "[train]") {
  irl::CorpusConfig cc;
  cc.n_train = 50;
  cc.n_dev_clean = 6;
  cc.n_dev_other = 6;
  cc.n_test_clean = 4;
  cc.n_test_other = 4;
  cc.n_content = 6;
  cc.min_len = 4;
  cc.max_len = 8;
  cc.spk_train = 6;
  cc.spk_other = 2;
  cc.n_tonal = 3;
  cc.n_band = 3;
  cc.n_babble = 3;
  cc.n_heldout = 3;
  irl::Corpus corpus = irl::build_corpus(cc);
  irl::Frontend fe = irl::make_frontend(corpus);

  irl::TrainConfig cfg;
  cfg.scheme = irl::TrainScheme::make(irl::SchemeKind::kBaseline);
  cfg.model.hidden = 16;
  cfg.model.n_content = 6;
  cfg.max_epochs = 3;
  cfg.profile_pairs = 2;

  irl::TrainResult r = irl::train(corpus, fe, cfg);
  REQUIRE(r.epochs == 3);
  REQUIRE(r.log.records.size() == 3);
  REQUIRE(r.ppl_history.size() == 3);
  REQUIRE(r.log.records[0].train_loss > r.log.records[1].train_loss);
  REQUIRE(r.log.records[1].train_loss > r.log.records[2].train_loss);
  REQUIRE_FALSE(r.resumed);
  REQUIRE(r.final_dev_other_cer >= 0.0);

  for (int i = 0; i < 3; ++i) {
    const irl::EpochRecord& rec = r.log.records[static_cast<size_t>(i)];
    REQUIRE(rec.epoch == i + 1);
    REQUIRE(rec.val_ppl > 1.0);
    REQUIRE(rec.val_ppl == r.ppl_history[static_cast<size_t>(i)]);
    REQUIRE(rec.val_cer >= 0.0);
    REQUIRE(rec.layer_l2.size() == irl::tap_names().size());
    REQUIRE(rec.layer_cosine.size() == irl::tap_names().size());
    REQUIRE(rec.wall_time_s > 0.0);
  }
  REQUIRE(r.log.records[0].lr == 0.001);

  const std::vector<std::string> lines = lines_of(irl::train_log_jsonl(r.log));
  REQUIRE(lines.size() == 3);
  REQUIRE(lines[0].find("{\"epoch\":1,\"train_loss\":") == 0);
  REQUIRE(lines[0].find("\"wall_time_s\":") != std::string::npos);
}

TEST_CASE("model and corpus must agree on the alphabet", "[train]") {
  const Tiny& t = Tiny::get();
  irl::TrainConfig cfg = tiny_cfg(irl::SchemeKind::kBaseline, 1);
  cfg.model.n_content = 5;
  REQUIRE_THROWS_AS(irl::train(t.corpus, t.fe, cfg), irl::ConfigError);
}

TEST_CASE("irl-e with zero penalty weights walks the data-aug path", "[train]") {
  const Tiny& t = Tiny::get();
  irl::TrainConfig a = tiny_cfg(irl::SchemeKind::kIrlE, 2);
  a.scheme.gamma = 0.0;
  a.scheme.lambda = 0.0;
  irl::TrainConfig b = tiny_cfg(irl::SchemeKind::kDataAug, 2);

  irl::TrainResult ra = irl::train(t.corpus, t.fe, a);
  irl::TrainResult rb = irl::train(t.corpus, t.fe, b);

  REQUIRE(ra.log.records.size() == rb.log.records.size());
  for (size_t i = 0; i < ra.log.records.size(); ++i) {
    REQUIRE(irl::epoch_record_canonical(ra.log.records[i]) ==
            irl::epoch_record_canonical(rb.log.records[i]));
  }
  auto pa = ra.model.named_parameters();
  auto pb = rb.model.named_parameters();
  REQUIRE(pa.size() == pb.size());
  for (size_t i = 0; i < pa.size(); ++i) {
    REQUIRE(pa[i].second.data() == pb[i].second.data());
  }
}

TEST_CASE("identical configs retrace the same run", "[train]") {
  const Tiny& t = Tiny::get();
  irl::TrainConfig cfg = tiny_cfg(irl::SchemeKind::kIrlC, 1);
  irl::TrainResult ra = irl::train(t.corpus, t.fe, cfg);
  irl::TrainResult rb = irl::train(t.corpus, t.fe, cfg);
  REQUIRE(irl::epoch_record_canonical(ra.log.records[0]) ==
          irl::epoch_record_canonical(rb.log.records[0]));
  auto pa = ra.model.named_parameters();
  auto pb = rb.model.named_parameters();
  for (size_t i = 0; i < pa.size(); ++i) {
    REQUIRE(pa[i].second.data() == pb[i].second.data());
  }
  REQUIRE(ra.final_dev_other_cer == rb.final_dev_other_cer);

  // A different repetition index lands on different weights.
  irl::TrainConfig other = cfg;
  other.seed_index = 1;
  irl::TrainResult rc = irl::train(t.corpus, t.fe, other);
  auto pc = rc.model.named_parameters();
  bool any_diff = false;
  for (size_t i = 0; i < pa.size() && !any_diff; ++i) {
    any_diff = pa[i].second.data() != pc[i].second.data();
  }
  REQUIRE(any_diff);
}

TEST_CASE("noise draws are fresh per epoch and reproducible", "[train]") {
  // Pins the seed-derivation contract the trainer uses: one stream per
  // (run, epoch, utterance), so resumption retraces every draw.
  const Tiny& t = Tiny::get();
  const uint64_t run_seed = irl::run_seed_of(tiny_cfg(irl::SchemeKind::kDataAug, 1));
  const irl::Utterance* u = t.corpus.split("train")[0];
  REQUIRE(t.corpus.bank.num_train > 0);

  auto spec_at = [&](int epoch) {
    irl::Rng rng(irl::derive_seed(
        irl::derive_seed(run_seed, irl::Stream::kNoise,
                         {static_cast<uint64_t>(epoch)}),
        irl::Stream::kNoise, u->id));
    return irl::sample_noise_spec(rng, t.corpus.bank.num_train);
  };
  const irl::NoiseSpec s1 = spec_at(1);
  const irl::NoiseSpec s1b = spec_at(1);
  const irl::NoiseSpec s2 = spec_at(2);
  REQUIRE(s1.snr_db == s1b.snr_db);
  REQUIRE(s1.shift_ms == s1b.shift_ms);
  REQUIRE(s1.noise_id == s1b.noise_id);
  REQUIRE((s1.snr_db != s2.snr_db || s1.shift_ms != s2.shift_ms ||
           s1.noise_id != s2.noise_id));
}

TEST_CASE("a resumed run retraces the uninterrupted one", "[train]") {
  const Tiny& t = Tiny::get();
  const fs::path straight = fresh_dir("irl-train-straight");
  const fs::path paused = fresh_dir("irl-train-paused");
  irl::TrainConfig cfg = tiny_cfg(irl::SchemeKind::kIrlC, 3);

  irl::TrainResult ra = irl::train(t.corpus, t.fe, cfg, straight);
  REQUIRE(ra.epochs == 3);

  irl::TrainConfig two = cfg;
  two.max_epochs = 2;
  irl::train(t.corpus, t.fe, two, paused);
  // Raising the cap resumes from epoch 2; caps are outside the guarded
  // config on purpose.
  irl::TrainResult rb = irl::train(t.corpus, t.fe, cfg, paused);
  REQUIRE(rb.resumed);
  REQUIRE(rb.epochs == 3);
  REQUIRE(rb.log.records.size() == 1);  // only the freshly trained epoch
  REQUIRE(rb.log.records[0].epoch == 3);

  for (int e = 2; e <= 3; ++e) {
    const std::string name = "ckpt-epoch-00" + std::to_string(e) + ".bin";
    REQUIRE(slurp(straight / name) == slurp(paused / name));
  }
  REQUIRE(slurp(straight / "manifest.json") == slurp(paused / "manifest.json"));

  const std::vector<std::string> la = lines_of(slurp(straight / "trainlog.jsonl"));
  const std::vector<std::string> lb = lines_of(slurp(paused / "trainlog.jsonl"));
  REQUIRE(la.size() == 3);
  REQUIRE(lb.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    REQUIRE(strip_wall(la[i]) == strip_wall(lb[i]));
  }
  // Epochs restored from the checkpoint carry a placeholder wall time.
  REQUIRE(lb[0].find("\"wall_time_s\":0.000}") != std::string::npos);
  REQUIRE(lb[1].find("\"wall_time_s\":0.000}") != std::string::npos);

  // Rerunning the finished directory is a no-op resume.
  irl::TrainResult rc = irl::train(t.corpus, t.fe, cfg, paused);
  REQUIRE(rc.resumed);
  REQUIRE(rc.epochs == 3);
  REQUIRE(rc.log.records.empty());
  REQUIRE(rc.final_dev_other_cer == rb.final_dev_other_cer);
  REQUIRE(rc.ppl_history == rb.ppl_history);

  // A different config refuses the directory outright.
  irl::TrainConfig hot = cfg;
  hot.scheme.gamma = 0.5;
  REQUIRE_THROWS_AS(irl::train(t.corpus, t.fe, hot, paused),
                    irl::IncompatibleCheckpoint);

  REQUIRE_THROWS_AS(
      irl::train(t.corpus, t.fe, cfg, straight / "not-created"),
      irl::PathError);
}

TEST_CASE("adversarial training carries its discriminator", "[train]") {
  const Tiny& t = Tiny::get();
  const fs::path dir = fresh_dir("irl-train-adv");
  irl::TrainConfig cfg = tiny_cfg(irl::SchemeKind::kAdversarial, 1);

  irl::TrainResult r = irl::train(t.corpus, t.fe, cfg, dir);
  REQUIRE(r.disc.has_value());
  REQUIRE(std::isfinite(r.log.records[0].train_loss));

  irl::Checkpoint ck = irl::load_checkpoint(dir / "ckpt-epoch-001.bin");
  for (auto& [name, tensor] : r.disc->named_parameters()) {
    const irl::NamedTensor* stored = ck.find(name);
    REQUIRE(stored != nullptr);
    REQUIRE(stored->data == tensor.data());
    REQUIRE(ck.find("adam.m." + name) != nullptr);
  }

  // Resume restores the discriminator too.
  irl::TrainConfig more = cfg;
  more.max_epochs = 2;
  irl::TrainResult r2 = irl::train(t.corpus, t.fe, more, dir);
  REQUIRE(r2.resumed);
  REQUIRE(r2.epochs == 2);
  REQUIRE(r2.disc.has_value());
}

TEST_CASE("validation perplexity averages tokens over both dev splits", "[train]") {
  const Tiny& t = Tiny::get();
  irl::TrainConfig cfg = tiny_cfg(irl::SchemeKind::kBaseline, 1);
  irl::TrainResult r = irl::train(t.corpus, t.fe, cfg);

  double ce = 0.0;
  long toks = 0;
  {
    irl::NoGradGuard ng;
    for (const char* split : {"dev-clean", "dev-other"}) {
      for (const irl::Utterance* u : t.corpus.split(split)) {
        const std::vector<int> content = t.corpus.vocab.encode(u->transcript);
        const std::vector<int> labels = irl::decoder_labels(t.corpus.vocab, content);
        irl::ForwardResult fr = irl::forward_teacher_forced(
            r.model, irl::features_of(t.fe, u->audio),
            irl::decoder_inputs(t.corpus.vocab, content), false);
        ce += irl::cross_entropy(fr.logits, labels).value();
        toks += static_cast<long>(labels.size());
      }
    }
  }
  REQUIRE(r.log.records[0].val_ppl ==
          std::exp(ce / static_cast<double>(toks)));
}

// --- Seed repetition and grid search ------------------------------------------

TEST_CASE("best_of_seeds keeps the replica with the best dev-other cer", "[train]") {
  const Tiny& t = Tiny::get();
  irl::TrainConfig cfg = tiny_cfg(irl::SchemeKind::kBaseline, 1);

  irl::TrainResult best = irl::best_of_seeds(t.corpus, t.fe, cfg, 2);

  irl::TrainConfig c0 = cfg;
  c0.seed_index = 0;
  irl::TrainResult r0 = irl::train(t.corpus, t.fe, c0);
  irl::TrainConfig c1 = cfg;
  c1.seed_index = 1;
  irl::TrainResult r1 = irl::train(t.corpus, t.fe, c1);

  REQUIRE(best.final_dev_other_cer ==
          std::min(r0.final_dev_other_cer, r1.final_dev_other_cer));
  const int want =
      r1.final_dev_other_cer < r0.final_dev_other_cer ? 1 : 0;  // ties keep 0
  REQUIRE(best.seed_index == want);

  REQUIRE_THROWS_AS(irl::best_of_seeds(t.corpus, t.fe, cfg, 0),
                    irl::ConfigError);
}

TEST_CASE("grid search degenerates to the base point when nothing varies", "[train]") {
  const Tiny& t = Tiny::get();

  irl::GridResult base_only = irl::grid_search(
      t.corpus, t.fe, tiny_cfg(irl::SchemeKind::kBaseline, 1), {0.01, 0.1});
  REQUIRE(base_only.trials.size() == 1);
  REQUIRE(base_only.best.kind == irl::SchemeKind::kBaseline);
  REQUIRE(base_only.best_cer == base_only.trials[0].dev_other_cer);

  // Probes equal to the incumbent are skipped, so a one-point grid that
  // matches the defaults degenerates the same way.
  irl::TrainConfig irle = tiny_cfg(irl::SchemeKind::kIrlE, 1);
  REQUIRE(irle.scheme.gamma == 0.01);
  REQUIRE(irle.scheme.lambda == 0.01);
  irl::GridResult pinned = irl::grid_search(t.corpus, t.fe, irle, {0.01});
  REQUIRE(pinned.trials.size() == 1);
  REQUIRE(pinned.best.gamma == 0.01);

  REQUIRE_THROWS_AS(irl::grid_search(t.corpus, t.fe, irle, {}),
                    irl::ConfigError);
}

TEST_CASE("grid search keeps the better penalty weight", "[train]") {
  const Tiny& t = Tiny::get();
  const fs::path dir = fresh_dir("irl-train-grid");
  irl::TrainConfig cfg = tiny_cfg(irl::SchemeKind::kWeightDecay, 1);
  REQUIRE(cfg.scheme.aux_weight == 1e-4);

  irl::GridResult g = irl::grid_search(t.corpus, t.fe, cfg, {0.01}, dir);
  REQUIRE(g.trials.size() == 2);  // incumbent plus one probe
  REQUIRE(g.trials[0].scheme.aux_weight == 1e-4);
  REQUIRE(g.trials[1].scheme.aux_weight == 0.01);

  // Recompute the winner: lowest cer, ties to the smaller weight.
  size_t want = 0;
  for (size_t i = 1; i < g.trials.size(); ++i) {
    const bool better =
        g.trials[i].dev_other_cer < g.trials[want].dev_other_cer ||
        (g.trials[i].dev_other_cer == g.trials[want].dev_other_cer &&
         g.trials[i].scheme.aux_weight < g.trials[want].scheme.aux_weight);
    if (better) want = i;
  }
  REQUIRE(g.best.aux_weight == g.trials[want].scheme.aux_weight);
  REQUIRE(g.best_cer == g.trials[want].dev_other_cer);

  REQUIRE(fs::is_directory(dir / "trial-base"));
  REQUIRE(fs::is_directory(dir / "trial-aux-0.01"));

  // A second pass over the same directory resumes the finished trials
  // and lands on the same answer.
  irl::GridResult h = irl::grid_search(t.corpus, t.fe, cfg, {0.01}, dir);
  REQUIRE(h.best_cer == g.best_cer);
  REQUIRE(h.best.aux_weight == g.best.aux_weight);
}
