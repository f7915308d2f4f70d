// include/irl/losses.hpp

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

#ifndef IRL_LOSSES_HPP
#define IRL_LOSSES_HPP

#include <atomic>
#include <cmath>
#include <string>
#include <vector>

#include "irl/errors.hpp"
#include "irl/model.hpp"
#include "irl/nn.hpp"
#include "irl/tensor.hpp"

namespace irl {

// Training objectives. Every scheme shares the cross-entropy core; the
// paired schemes add an invariance penalty between the clean-pass and
// noisy-pass representations. Penalties are summed per example pair, not
// averaged, matching the cross-entropy convention.

enum class SchemeKind {
  kBaseline,       // clean cross-entropy only
  kDataAug,        // + noisy-copy cross-entropy (multi-condition training)
  kAdversarial,    // + domain discriminator with gradient reversal
  kLogitPairing,   // + pair penalty on logits
  kWeightDecay,    // + L2 on weight matrices
  kActShrink,      // + L2 on encoder activations
  kIrlE,           // + pair penalty on the encoder output
  kIrlC,           // + pair penalty on encoder, decoder layers, and logits
};

struct TrainScheme {
  SchemeKind kind = SchemeKind::kBaseline;
  double alpha = 1.0;       // weight on the noisy cross-entropy
  double gamma = 0.0;       // L2 pairing weight
  double lambda = 0.0;      // cosine pairing weight
  double aux_weight = 0.0;  // decay / shrink coefficient; ignored elsewhere

  // Tuned defaults per scheme.
  static TrainScheme make(SchemeKind k) {
    TrainScheme s;
    s.kind = k;
    switch (k) {
      case SchemeKind::kBaseline:
      case SchemeKind::kDataAug:
        break;
      case SchemeKind::kAdversarial:
        s.aux_weight = 1.0;  // reversal scale (fixed)
        break;
      case SchemeKind::kLogitPairing:
      case SchemeKind::kIrlE:
      case SchemeKind::kIrlC:
        s.gamma = 0.01;
        s.lambda = 0.01;
        break;
      case SchemeKind::kWeightDecay:
        s.aux_weight = 1e-4;
        break;
      case SchemeKind::kActShrink:
        s.aux_weight = 0.02;
        break;
    }
    return s;
  }

  std::string name() const {
    switch (kind) {
      case SchemeKind::kBaseline: return "baseline";
      case SchemeKind::kDataAug: return "data_aug";
      case SchemeKind::kAdversarial: return "adversarial";
      case SchemeKind::kLogitPairing: return "logit_pairing";
      case SchemeKind::kWeightDecay: return "weight_decay";
      case SchemeKind::kActShrink: return "act_shrink";
      case SchemeKind::kIrlE: return "irl_e";
      case SchemeKind::kIrlC: return "irl_c";
    }
    return "?";
  }

  static TrainScheme parse(const std::string& name) {
    for (SchemeKind k : all_kinds()) {
      TrainScheme s = make(k);
      if (s.name() == name) return s;
    }
    throw ConfigError("unknown scheme: " + name +
                      " (expected baseline|data_aug|adversarial|logit_pairing|"
                      "weight_decay|act_shrink|irl_e|irl_c)");
  }

  static const std::vector<SchemeKind>& all_kinds() {
    static const std::vector<SchemeKind> kinds = {
        SchemeKind::kBaseline,     SchemeKind::kDataAug,
        SchemeKind::kAdversarial,  SchemeKind::kLogitPairing,
        SchemeKind::kWeightDecay,  SchemeKind::kActShrink,
        SchemeKind::kIrlE,         SchemeKind::kIrlC,
    };
    return kinds;
  }

  bool uses_noisy() const { return kind != SchemeKind::kBaseline; }
};

// Decoder input/label sequences for teacher forcing: the decoder consumes
// <sos> + content and is scored against content + <eos> (same length).
inline std::vector<int> decoder_inputs(const Vocab& v, const std::vector<int>& content) {
  std::vector<int> in{v.sos_id};
  in.insert(in.end(), content.begin(), content.end());
  return in;
}

inline std::vector<int> decoder_labels(const Vocab& v, const std::vector<int>& content) {
  std::vector<int> lab(content);
  lab.push_back(v.eos_id);
  return lab;
}

// Summed token cross-entropy over the rows of [T2 x C] logits.
// Computed as logsumexp(row) - row[label] with a constant max shift, so
// it never exponentiates large values. Positions labeled pad_id are
// excluded.
inline Tensor cross_entropy(const Tensor& logits, const std::vector<int>& labels,
                            int pad_id = -1) {
  if (logits.rows() != static_cast<int>(labels.size())) {
    throw ShapeError("cross_entropy: logit rows != label count");
  }
  const int C = logits.cols();
  Tensor acc;
  bool any = false;
  for (int t = 0; t < logits.rows(); ++t) {
    const int y = labels[static_cast<size_t>(t)];
    if (y == pad_id) continue;
    if (y < 0 || y >= C) throw VocabError("cross_entropy: label out of range");
    Tensor r = row(logits, t);
    double mx = r.data()[0];
    for (double v : r.data()) mx = std::max(mx, v);
    Tensor lse = add_scalar(log(sum(exp(add_scalar(r, -mx)))), mx);
    Tensor picked = slice(logits, t, t + 1, y, y + 1);
    Tensor ce_t = sub(lse, picked);
    acc = any ? add(acc, ce_t) : ce_t;
    any = true;
  }
  if (!any) return Tensor::scalar(0.0);
  return acc;
}

// Count of pair_penalty calls that dropped the cosine term because one
// input's norm was at or below the 1e-8 guard.
inline std::atomic<uint64_t>& cosine_guard_trips() {
  static std::atomic<uint64_t> n{0};
  return n;
}

// gamma * ||a - b||^2 - lambda * cos(a, b). The cosine denominator is
// sqrt(ssa * ssb) rather than sqrt(ssa) * sqrt(ssb): with a == b this
// makes the quotient exactly 1, so pair_penalty(a, a) == -lambda to the
// last bit. Near-zero norms drop the cosine term (counted warning).
inline Tensor pair_penalty(const Tensor& a, const Tensor& b, double gamma,
                           double lambda) {
  if (a.shape() != b.shape()) throw ShapeError("pair_penalty shape mismatch");
  Tensor d = sub(a, b);
  Tensor l2 = dot(d, d);
  Tensor term = mul_scalar(l2, gamma);
  double ssa = 0.0, ssb = 0.0;
  for (double v : a.data()) ssa += v * v;
  for (double v : b.data()) ssb += v * v;
  if (std::sqrt(ssa) <= 1e-8 || std::sqrt(ssb) <= 1e-8) {
    cosine_guard_trips()++;
    return term;
  }
  Tensor cosine = div(dot(a, b), sqrt(mul(dot(a, a), dot(b, b))));
  return add(term, mul_scalar(cosine, -lambda));
}

namespace detail {

inline const Tensor& require_tap(const Tensor& t, const char* which) {
  if (!t.node()) throw TapError(std::string("missing representation tap: ") + which);
  return t;
}

}  // namespace detail

// Pair penalty at the encoder tap only.
inline Tensor penalty_encoder(const RepresentationTaps& c, const RepresentationTaps& n,
                              double gamma, double lambda) {
  return pair_penalty(detail::require_tap(c.phi_e, "enc"),
                      detail::require_tap(n.phi_e, "enc"), gamma, lambda);
}

// Pair penalty at the logits tap only.
inline Tensor penalty_logits(const RepresentationTaps& c, const RepresentationTaps& n,
                             double gamma, double lambda) {
  return pair_penalty(detail::require_tap(c.logits, "logits"),
                      detail::require_tap(n.logits, "logits"), gamma, lambda);
}

// Cumulative penalty over the ordered tap set {enc, dec1..dec4, logits}.
inline Tensor penalty_cumulative(const RepresentationTaps& c, const RepresentationTaps& n,
                                 double gamma, double lambda) {
  if (c.phi_dec.size() != 4 || n.phi_dec.size() != 4) {
    throw TapError("cumulative penalty needs all four decoder taps");
  }
  std::vector<Tensor> ca = c.all(), na = n.all();
  Tensor acc;
  for (size_t i = 0; i < ca.size(); ++i) {
    Tensor p = pair_penalty(detail::require_tap(ca[i], tap_names()[i].c_str()),
                            detail::require_tap(na[i], tap_names()[i].c_str()),
                            gamma, lambda);
    acc = i ? add(acc, p) : p;
  }
  return acc;
}

// coeff * sum ||W||^2 over the given weight matrices.
inline Tensor weight_decay_term(const std::vector<Tensor>& weights, double coeff) {
  Tensor acc;
  bool any = false;
  for (const Tensor& w : weights) {
    Tensor s = dot(w, w);
    acc = any ? add(acc, s) : s;
    any = true;
  }
  if (!any) return Tensor::scalar(0.0);
  return mul_scalar(acc, coeff);
}

// coeff * (||phi_e(x)||^2 + ||phi_e(x')||^2).
inline Tensor act_shrink_term(const Tensor& phi_e_clean, const Tensor& phi_e_noisy,
                              double coeff) {
  return mul_scalar(add(dot(phi_e_clean, phi_e_clean), dot(phi_e_noisy, phi_e_noisy)),
                    coeff);
}

// Domain discriminator: two dense layers of rectified-linear units, then
// a single sigmoid output, applied to one encoder state at a time.
struct Discriminator {
  LinearParams l1, l2, l3;
  int in_dim = 0;
  int width = 0;

  static Discriminator init(int in_dim, Rng& rng, int width = 256) {
    Discriminator d;
    d.in_dim = in_dim;
    d.width = width;
    d.l1 = LinearParams::init(in_dim, width, rng);
    d.l2 = LinearParams::init(width, width, rng);
    d.l3 = LinearParams::init(width, 1, rng);
    return d;
  }

  Tensor operator()(const Tensor& x) const {
    return sigmoid(l3(relu(l2(relu(l1(x))))));
  }

  std::vector<std::pair<std::string, Tensor>> named_parameters() const {
    return {{"disc.l1.W", l1.W}, {"disc.l1.b", l1.b}, {"disc.l2.W", l2.W},
            {"disc.l2.b", l2.b}, {"disc.l3.W", l3.W}, {"disc.l3.b", l3.b}};
  }

  std::vector<Tensor> parameters() const {
    std::vector<Tensor> out;
    for (auto& [name, t] : named_parameters()) out.push_back(t);
    return out;
  }
};

// Mean binary cross-entropy of the discriminator over the rows of a
// [T1 x d] state matrix, against a constant domain label.
inline Tensor discriminator_bce(const Discriminator& disc, const Tensor& states,
                                int label) {
  const int T = states.rows();
  const int d = states.cols();
  Tensor acc;
  for (int t = 0; t < T; ++t) {
    Tensor x = transpose(slice(states, t, t + 1, 0, d));
    Tensor p = disc(x);
    Tensor bce = (label == 1)
                     ? mul_scalar(log(p), -1.0)
                     : mul_scalar(log(add_scalar(mul_scalar(p, -1.0), 1.0)), -1.0);
    acc = t ? add(acc, bce) : bce;
  }
  return mul_scalar(acc, 1.0 / T);
}

// One training pair's losses. `task` is the scalar the model parameters
// descend; for the adversarial scheme `disc` is additionally populated:
// its graph runs through a gradient reversal at the encoder boundary, so
// one backward pass over it pushes the discriminator toward classifying
// domains while pushing the encoder the opposite way. Discriminator
// parameters appear in no other term.
struct LossBundle {
  Tensor task;
  Tensor disc;  // null unless adversarial
  double ce_clean = 0.0;
  double ce_noisy = 0.0;
  double penalty = 0.0;     // pairing / decay / shrink value
  double disc_value = 0.0;  // discriminator BCE value
  double task_value = 0.0;  // reported training loss
};

// Composes the full loss for one clean/noisy pair under `scheme`.
// `noisy` may be null only for the baseline scheme (clean-only training).
inline LossBundle scheme_loss(const Seq2Seq& m, const TrainScheme& scheme,
                              const FeatureMatrix& clean, const FeatureMatrix* noisy,
                              const std::vector<int>& dec_in,
                              const std::vector<int>& labels,
                              const Discriminator* disc = nullptr) {
  const int pad = m.cfg.vocab().pad_id;
  LossBundle out;

  const bool want_taps = scheme.kind == SchemeKind::kIrlE ||
                         scheme.kind == SchemeKind::kIrlC ||
                         scheme.kind == SchemeKind::kActShrink ||
                         scheme.kind == SchemeKind::kAdversarial;
  ForwardResult fc = forward_teacher_forced(m, clean, dec_in, want_taps);
  Tensor ce_c = cross_entropy(fc.logits, labels, pad);
  out.ce_clean = ce_c.value();

  if (scheme.kind == SchemeKind::kBaseline) {
    out.task = ce_c;
    out.task_value = out.ce_clean;
    return out;
  }
  if (!noisy) throw ConfigError("scheme " + scheme.name() + " needs a noisy pass");

  ForwardResult fn = forward_teacher_forced(m, *noisy, dec_in, want_taps);
  Tensor ce_n = cross_entropy(fn.logits, labels, pad);
  out.ce_noisy = ce_n.value();
  Tensor core = add(ce_c, mul_scalar(ce_n, scheme.alpha));

  // With both pairing weights zero the penalty graph is omitted entirely,
  // so these schemes reduce to the data-augmentation loss bit for bit.
  const bool pairing = scheme.gamma != 0.0 || scheme.lambda != 0.0;
  Tensor penalty;
  switch (scheme.kind) {
    case SchemeKind::kDataAug:
      break;
    case SchemeKind::kIrlE: {
      RepresentationTaps tc = fc.taps, tn = fn.taps;
      if (pairing) penalty = penalty_encoder(tc, tn, scheme.gamma, scheme.lambda);
      break;
    }
    case SchemeKind::kIrlC: {
      if (pairing) {
        penalty = penalty_cumulative(fc.taps, fn.taps, scheme.gamma, scheme.lambda);
      }
      break;
    }
    case SchemeKind::kLogitPairing: {
      RepresentationTaps tc, tn;
      tc.logits = fc.logits;
      tn.logits = fn.logits;
      if (pairing) penalty = penalty_logits(tc, tn, scheme.gamma, scheme.lambda);
      break;
    }
    case SchemeKind::kWeightDecay:
      if (scheme.aux_weight != 0.0) {
        penalty = weight_decay_term(m.weight_matrices(), scheme.aux_weight);
      }
      break;
    case SchemeKind::kActShrink:
      if (scheme.aux_weight != 0.0) {
        penalty = act_shrink_term(fc.taps.phi_e, fn.taps.phi_e, scheme.aux_weight);
      }
      break;
    case SchemeKind::kAdversarial: {
      if (!disc) throw ConfigError("adversarial scheme needs a discriminator");
      out.disc = add(discriminator_bce(*disc, grad_reverse(fc.taps.phi_e), 0),
                     discriminator_bce(*disc, grad_reverse(fn.taps.phi_e), 1));
      out.disc_value = out.disc.value();
      break;
    }
    case SchemeKind::kBaseline:
      break;  // handled above
  }

  out.task = penalty.node() ? add(core, penalty) : core;
  out.penalty = penalty.node() ? penalty.value() : 0.0;
  if (scheme.kind == SchemeKind::kAdversarial) {
    // The reported objective counts the reversed discriminator term.
    out.task_value = out.ce_clean + scheme.alpha * out.ce_noisy - out.disc_value;
  } else {
    out.task_value = out.task.value();
  }
  return out;
}

}  // namespace irl

#endif  // IRL_LOSSES_HPP
