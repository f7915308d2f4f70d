// include/irl/cli.hpp

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

#ifndef IRL_CLI_HPP
#define IRL_CLI_HPP

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "irl/config.hpp"
#include "irl/evalsuite.hpp"
#include "irl/train.hpp"

namespace irl {
namespace cli {

namespace fs = std::filesystem;

struct Args {
  std::string command;
  RunConfig cfg = RunConfig::defaults();
  std::string checkpoint;
  std::string suite = "clean";
  bool force = false;
};

inline const char* usage() {
  return
      "usage: irlkit <command> [--config FILE] [--key value ...]\n"
      "\n"
      "commands:\n"
      "  synth      write the synthetic corpus, noise bank, and manifest\n"
      "  train      train one scheme across seed repetitions (resumable)\n"
      "  eval       score a checkpoint (--checkpoint X --suite clean|ood)\n"
      "  analyze    clean/noisy distance profile of a checkpoint\n"
      "  search     grid-search the scheme's penalty weights\n"
      "  compare    train every scheme and emit the joint OOD table\n"
      "\n"
      "Any config key doubles as a flag (e.g. --scheme irl_c --seeds 3);\n"
      "--out sets the output root, --parallel the worker count, --force\n"
      "overwrites synth output. IRLKIT_OUTDIR and IRLKIT_WORKERS supply\n"
      "defaults for the output root and worker count.\n";
}

namespace detail {

inline std::string normalize_key(std::string k) {
  for (char& c : k) {
    if (c == '-') c = '_';
  }
  return k;
}

// Flags beat config-file values no matter where --config sits on the
// line, so the file is loaded in a first pass.
inline Args parse_args(const std::vector<std::string>& argv) {
  Args a;
  if (argv.empty()) throw ConfigError("missing command");
  a.command = argv[0];

  std::vector<std::pair<std::string, std::string>> flags;
  for (size_t i = 1; i < argv.size(); ++i) {
    const std::string& arg = argv[i];
    if (arg.rfind("--", 0) != 0) {
      throw ConfigError("unexpected argument: " + arg);
    }
    std::string key = arg.substr(2);
    std::string value;
    const size_t eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else if (key != "force") {
      if (i + 1 >= argv.size()) throw ConfigError("flag --" + key + " needs a value");
      value = argv[++i];
    }
    flags.emplace_back(normalize_key(key), value);
  }

  for (const auto& [key, value] : flags) {
    if (key == "config") a.cfg.load_file(value);
  }
  for (const auto& [key, value] : flags) {
    if (key == "config") continue;
    if (key == "force") {
      a.force = true;
    } else if (key == "checkpoint") {
      a.checkpoint = value;
    } else if (key == "suite") {
      a.suite = value;
    } else if (key == "out") {
      a.cfg.set("outdir", value);
    } else if (key == "parallel") {
      a.cfg.set("workers", value);
    } else {
      a.cfg.set(key, value);  // unknown keys are refused here
    }
  }
  return a;
}

inline std::string fmt(const char* format, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, x);
  return buf;
}

// The run root is created on demand, but only if its parent exists;
// a bogus --out fails instead of silently growing a tree.
inline fs::path ensure_root(const RunConfig& cfg) {
  const fs::path root = cfg.resolved_outdir();
  if (!fs::exists(root)) {
    const fs::path parent = root.parent_path();
    if (!parent.empty() && !fs::exists(parent)) {
      throw PathError("output dir parent does not exist: " + parent.string());
    }
    fs::create_directory(root);
  }
  return root;
}

inline bool dir_non_empty(const fs::path& p) {
  return fs::exists(p) && !fs::is_empty(p);
}

// Loads a checkpoint and proves it belongs to this config and corpus
// before anything is scored against it.
inline Checkpoint verified_checkpoint(const Args& a, const Corpus& corpus) {
  if (a.checkpoint.empty()) throw ConfigError("--checkpoint is required");
  Checkpoint ck = load_checkpoint(a.checkpoint);
  TrainConfig tc = a.cfg.train_config();
  tc.seed_index = static_cast<int>(std::stoll(ck.get("seed_index")));
  if (ck.get("config_hash") != hex64(train_config_hash(tc))) {
    throw IncompatibleCheckpoint(
        "checkpoint was produced by a different config: " + a.checkpoint);
  }
  if (ck.get("corpus_hash") != hex64(manifest_hash(corpus))) {
    throw IncompatibleCheckpoint(
        "checkpoint was trained on a different corpus: " + a.checkpoint);
  }
  return ck;
}

inline int cmd_synth(const Args& a, std::ostream& out) {
  const fs::path root = ensure_root(a.cfg);
  const fs::path dir = root / "corpus";
  if (dir_non_empty(dir) && !a.force) {
    throw RefusedOverwrite("corpus dir is not empty (use --force): " +
                           dir.string());
  }
  Corpus corpus = build_corpus(a.cfg.corpus_config());
  fs::create_directories(dir / "wav");
  fs::create_directories(dir / "bank");
  for (const Utterance& u : corpus.utterances) {
    write_wav(dir / "wav" / (u.id + ".wav"), u.audio);
  }
  for (const NoiseTrack& t : corpus.bank.tracks) {
    write_wav(dir / "bank" / (t.name + ".wav"), t.audio);
  }
  atomic_write_file(dir / "manifest.tsv", manifest_text(corpus));
  atomic_write_file(dir / "config.txt", a.cfg.serialize());
  out << "corpus " << dir.string() << "\n";
  out << "utterances " << corpus.utterances.size() << "\n";
  out << "noise_tracks " << corpus.bank.tracks.size() << "\n";
  out << "config_hash " << hex64(a.cfg.hash()) << "\n";
  out << "manifest_hash " << hex64(manifest_hash(corpus)) << "\n";
  return 0;
}

inline int cmd_train(const Args& a, std::ostream& out) {
  const fs::path root = ensure_root(a.cfg);
  Corpus corpus = build_corpus(a.cfg.corpus_config());
  Frontend fe = make_frontend(corpus);
  TrainConfig base = a.cfg.train_config();
  const int seeds = static_cast<int>(a.cfg.get_int("seeds"));
  if (seeds < 1) throw ConfigError("seeds must be positive");

  const fs::path rundir = root / ("train-" + base.scheme.name());
  int best = 0;
  double best_cer = 0.0;
  for (int i = 0; i < seeds; ++i) {
    TrainConfig cfg = base;
    cfg.seed_index = i;
    const fs::path dir = rundir / ("seed-" + std::to_string(i));
    fs::create_directories(dir);
    TrainResult r = train(corpus, fe, cfg, dir);
    out << "{\"scheme\":\"" << base.scheme.name() << "\",\"seed_index\":" << i
        << ",\"epochs\":" << r.epochs
        << ",\"dev_other_cer\":" << fmt("%.6g", r.final_dev_other_cer)
        << ",\"resumed\":" << (r.resumed ? "true" : "false")
        << ",\"config_hash\":\"" << hex64(train_config_hash(cfg)) << "\"}\n";
    if (i == 0 || r.final_dev_other_cer < best_cer) {
      best = i;
      best_cer = r.final_dev_other_cer;
    }
  }
  out << "{\"best_seed_index\":" << best
      << ",\"dev_other_cer\":" << fmt("%.6g", best_cer) << "}\n";
  return 0;
}

inline int cmd_eval(const Args& a, std::ostream& out) {
  Corpus corpus = build_corpus(a.cfg.corpus_config());
  Frontend fe = make_frontend(corpus);
  Checkpoint ck = verified_checkpoint(a, corpus);
  Seq2Seq model = model_from_checkpoint(ck);
  const int beam = static_cast<int>(a.cfg.get_int("beam_width"));
  const std::string scheme = ck.get("scheme");
  const std::string hash = ck.get("config_hash");
  const fs::path dir = fs::path(a.checkpoint).parent_path();

  if (a.suite == "clean") {
    std::string tsv = "split\tcer\n";
    std::string jsonl;
    for (const char* split :
         {"dev-clean", "dev-other", "test-clean", "test-other"}) {
      const double cer = split_cer(model, corpus, fe, split, beam);
      tsv += std::string(split) + "\t" + fmt("%.4f", cer) + "\n";
      jsonl += "{\"model\":\"" + scheme + "\",\"split\":\"" + split +
               "\",\"cer\":" + fmt("%.6g", cer) + ",\"config_hash\":\"" + hash +
               "\"}\n";
    }
    out << tsv;
    atomic_write_file(dir / "eval-clean.tsv", tsv);
    atomic_write_file(dir / "eval-clean.jsonl", jsonl);
    return 0;
  }
  if (a.suite == "ood") {
    OodResult r = ood_suite(model, corpus, fe,
                            static_cast<uint64_t>(a.cfg.get_int("eval_seed")),
                            beam);
    const std::string tsv = ood_tsv({scheme}, {r});
    std::string jsonl;
    for (size_t i = 0; i < r.conditions.size(); ++i) {
      jsonl += "{\"model\":\"" + scheme + "\",\"condition\":\"" +
               r.conditions[i] + "\",\"cer\":" + fmt("%.6g", r.cers[i]) +
               ",\"config_hash\":\"" + hash + "\"}\n";
    }
    out << tsv;
    atomic_write_file(dir / "eval-ood.tsv", tsv);
    atomic_write_file(dir / "eval-ood.jsonl", jsonl);
    return 0;
  }
  throw ConfigError("unknown suite: " + a.suite + " (clean or ood)");
}

inline int cmd_analyze(const Args& a, std::ostream& out) {
  Corpus corpus = build_corpus(a.cfg.corpus_config());
  Frontend fe = make_frontend(corpus);
  Checkpoint ck = verified_checkpoint(a, corpus);
  Seq2Seq model = model_from_checkpoint(ck);
  std::vector<EvalPair> pairs = make_eval_pairs(
      corpus, fe, static_cast<int>(a.cfg.get_int("profile_count")),
      a.cfg.get_num("snr_db"),
      static_cast<uint64_t>(a.cfg.get_int("eval_seed")), "test-clean");
  DistanceProfile prof = distance_profile(model, pairs);

  std::string tsv = "layer\tl2\tcosine\n";
  for (size_t i = 0; i < prof.layers.size(); ++i) {
    tsv += prof.layers[i] + "\t" + fmt("%.6g", prof.l2[i]) + "\t" +
           fmt("%.6g", prof.cosine[i]) + "\n";
  }
  out << tsv;
  const fs::path dir = fs::path(a.checkpoint).parent_path();
  atomic_write_file(dir / "profile.json",
                    "{\"config_hash\":\"" + ck.get("config_hash") +
                        "\",\"profile\":" + distance_profile_json(prof) +
                        "}\n");
  return 0;
}

inline int cmd_search(const Args& a, std::ostream& out) {
  const fs::path root = ensure_root(a.cfg);
  Corpus corpus = build_corpus(a.cfg.corpus_config());
  Frontend fe = make_frontend(corpus);
  TrainConfig base = a.cfg.train_config();
  const fs::path dir = root / ("search-" + base.scheme.name());
  fs::create_directories(dir);

  GridResult g = grid_search(corpus, fe, base, a.cfg.grid_values(), dir,
                             a.cfg.resolved_workers());

  std::string tsv = "scheme\tgamma\tlambda\taux_weight\tdev_other_cer\n";
  std::string jsonl;
  for (const GridTrial& t : g.trials) {
    tsv += t.scheme.name() + "\t" + fmt("%g", t.scheme.gamma) + "\t" +
           fmt("%g", t.scheme.lambda) + "\t" + fmt("%g", t.scheme.aux_weight) +
           "\t" + fmt("%.4f", t.dev_other_cer) + "\n";
    jsonl += "{\"scheme\":\"" + t.scheme.name() + "\",\"gamma\":" +
             fmt("%g", t.scheme.gamma) + ",\"lambda\":" +
             fmt("%g", t.scheme.lambda) + ",\"aux_weight\":" +
             fmt("%g", t.scheme.aux_weight) + ",\"dev_other_cer\":" +
             fmt("%.6g", t.dev_other_cer) + ",\"config_hash\":\"" +
             hex64(a.cfg.hash()) + "\"}\n";
  }
  out << tsv;
  out << "{\"best_gamma\":" << fmt("%g", g.best.gamma)
      << ",\"best_lambda\":" << fmt("%g", g.best.lambda)
      << ",\"best_aux_weight\":" << fmt("%g", g.best.aux_weight)
      << ",\"dev_other_cer\":" << fmt("%.6g", g.best_cer) << "}\n";
  atomic_write_file(dir / "search.tsv", tsv);
  atomic_write_file(dir / "search.jsonl", jsonl);
  return 0;
}

inline int cmd_compare(const Args& a, std::ostream& out, std::ostream& err) {
  const fs::path root = ensure_root(a.cfg);
  Corpus corpus = build_corpus(a.cfg.corpus_config());
  Frontend fe = make_frontend(corpus);
  const int seeds = static_cast<int>(a.cfg.get_int("seeds"));
  const int workers = a.cfg.resolved_workers();
  const fs::path dir = root / "compare";
  fs::create_directories(dir);

  std::vector<EvalPair> pairs = make_eval_pairs(
      corpus, fe, static_cast<int>(a.cfg.get_int("profile_count")),
      a.cfg.get_num("snr_db"),
      static_cast<uint64_t>(a.cfg.get_int("eval_seed")), "test-clean");

  std::vector<std::string> ok_names;
  std::vector<OodResult> ood;
  std::string profiles;
  std::vector<std::string> failures;
  for (const std::string& name : all_scheme_names()) {
    try {
      TrainConfig cfg = a.cfg.train_config();
      cfg.scheme = TrainScheme::make(scheme_kind_from_name(name));
      TrainResult r =
          best_of_seeds(corpus, fe, cfg, seeds, dir / name, workers);
      ood.push_back(ood_suite(
          r.model, corpus, fe,
          static_cast<uint64_t>(a.cfg.get_int("eval_seed")),
          static_cast<int>(a.cfg.get_int("beam_width"))));
      profiles += "{\"scheme\":\"" + name + "\",\"profile\":" +
                  distance_profile_json(distance_profile(r.model, pairs)) +
                  "}\n";
      ok_names.push_back(name);
    } catch (const Error& e) {
      failures.push_back(name + ": " + e.what());
    }
  }

  if (!ok_names.empty()) {
    const std::string tsv = ood_tsv(ok_names, ood);
    out << tsv;
    std::string jsonl;
    for (size_t s = 0; s < ok_names.size(); ++s) {
      for (size_t i = 0; i < ood[s].conditions.size(); ++i) {
        jsonl += "{\"model\":\"" + ok_names[s] + "\",\"condition\":\"" +
                 ood[s].conditions[i] + "\",\"cer\":" +
                 fmt("%.6g", ood[s].cers[i]) + ",\"config_hash\":\"" +
                 hex64(a.cfg.hash()) + "\"}\n";
      }
    }
    atomic_write_file(dir / "compare.tsv", tsv);
    atomic_write_file(dir / "compare.jsonl", jsonl);
    atomic_write_file(dir / "profiles.json", profiles);
  }
  for (const std::string& f : failures) err << "failed: " << f << "\n";
  return failures.empty() ? 0 : 1;
}

}  // namespace detail

// Entry point shared by the binary and the tests. Returns the process
// exit code: 0 when all requested work completed, 1 on an error, 2 on
// a usage mistake.
inline int run_cli(const std::vector<std::string>& argv, std::ostream& out,
                   std::ostream& err) {
  Args a;
  try {
    a = detail::parse_args(argv);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n" << usage();
    return 2;
  }
  try {
    if (a.command == "synth") return detail::cmd_synth(a, out);
    if (a.command == "train") return detail::cmd_train(a, out);
    if (a.command == "eval") return detail::cmd_eval(a, out);
    if (a.command == "analyze") return detail::cmd_analyze(a, out);
    if (a.command == "search") return detail::cmd_search(a, out);
    if (a.command == "compare") return detail::cmd_compare(a, out, err);
    err << "error: unknown command: " << a.command << "\n" << usage();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cli
}  // namespace irl

#endif  // IRL_CLI_HPP
