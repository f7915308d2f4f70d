// include/irl/optim.hpp

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

#ifndef IRL_OPTIM_HPP
#define IRL_OPTIM_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "irl/checkpoint.hpp"
#include "irl/errors.hpp"
#include "irl/tensor.hpp"

namespace irl {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 5.0;  // global gradient-norm ceiling; <= 0 disables
};

// Adam with bias correction over a fixed set of named parameters. The
// learning rate lives on `cfg` so the schedule can halve it in place.
class Adam {
 public:
  AdamConfig cfg;

  static Adam init(std::vector<std::pair<std::string, Tensor>> named,
                   AdamConfig cfg = {}) {
    Adam a;
    a.cfg = cfg;
    a.params_ = std::move(named);
    a.m_.resize(a.params_.size());
    a.v_.resize(a.params_.size());
    for (size_t i = 0; i < a.params_.size(); ++i) {
      const size_t n = a.params_[i].second.numel();
      a.m_[i].assign(n, 0.0);
      a.v_[i].assign(n, 0.0);
    }
    return a;
  }

  long long step_count() const { return t_; }

  // Global L2 norm over all parameter gradients; unallocated gradients
  // count as zero.
  double grad_norm() const {
    double ss = 0.0;
    for (const auto& [name, p] : params_) {
      for (double g : p.grad()) ss += g * g;
    }
    return std::sqrt(ss);
  }

  void zero_grad() {
    for (auto& [name, p] : params_) {
      p.grad().assign(p.numel(), 0.0);
    }
  }

  // One Adam update. Aborts on any non-finite gradient before touching
  // parameters or moments, so a poisoned step leaves the model intact.
  void step() {
    for (const auto& [name, p] : params_) {
      for (double g : p.grad()) {
        if (!std::isfinite(g)) {
          throw NumericError("non-finite gradient in " + name);
        }
      }
    }
    double scale = 1.0;
    if (cfg.clip_norm > 0.0) {
      const double norm = grad_norm();
      if (norm > cfg.clip_norm) scale = cfg.clip_norm / norm;
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
      Tensor& p = params_[i].second;
      std::vector<double>& data = p.data();
      const std::vector<double>& grad = p.grad();
      for (size_t k = 0; k < data.size(); ++k) {
        const double g = (k < grad.size() ? grad[k] : 0.0) * scale;
        m_[i][k] = cfg.beta1 * m_[i][k] + (1.0 - cfg.beta1) * g;
        v_[i][k] = cfg.beta2 * v_[i][k] + (1.0 - cfg.beta2) * g * g;
        const double mhat = m_[i][k] / bc1;
        const double vhat = v_[i][k] / bc2;
        data[k] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
      }
    }
  }

  // Moment buffers and step state as checkpoint entries, so a resumed
  // run continues the exact trajectory.
  void save_into(Checkpoint& ck) const {
    ck.kv["adam.step"] = std::to_string(t_);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", cfg.lr);
    ck.kv["adam.lr"] = buf;
    for (size_t i = 0; i < params_.size(); ++i) {
      const Tensor& p = params_[i].second;
      const int r = p.rows(), c = p.cols();
      ck.tensors.push_back({"adam.m." + params_[i].first, r, c, m_[i]});
      ck.tensors.push_back({"adam.v." + params_[i].first, r, c, v_[i]});
    }
  }

  void load_from(const Checkpoint& ck) {
    t_ = std::stoll(ck.get("adam.step"));
    cfg.lr = std::stod(ck.get("adam.lr"));
    for (size_t i = 0; i < params_.size(); ++i) {
      for (const char* kind : {"m", "v"}) {
        const std::string name =
            std::string("adam.") + kind + "." + params_[i].first;
        const NamedTensor* t = ck.find(name);
        if (!t) throw IncompatibleCheckpoint("missing tensor " + name);
        if (t->data.size() != params_[i].second.numel()) {
          throw IncompatibleCheckpoint("shape mismatch for " + name);
        }
        (kind[0] == 'm' ? m_ : v_)[i] = t->data;
      }
    }
  }

 private:
  std::vector<std::pair<std::string, Tensor>> params_;
  std::vector<std::vector<double>> m_, v_;
  long long t_ = 0;
};

}  // namespace irl

#endif  // IRL_OPTIM_HPP
