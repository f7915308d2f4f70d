// include/irl/metrics.hpp

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

#ifndef IRL_METRICS_HPP
#define IRL_METRICS_HPP

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "irl/errors.hpp"

namespace irl {

// Levenshtein distance with unit insertion/deletion/substitution costs,
// two-row dynamic program.
inline int edit_distance(const std::string& a, const std::string& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

inline double cer(const std::string& hyp, const std::string& ref) {
  if (ref.empty()) throw DegenerateReference("cer: empty reference");
  return static_cast<double>(edit_distance(hyp, ref)) /
         static_cast<double>(ref.size());
}

// Corpus-level CER: total edits over total reference length, the
// conventional weighting for reporting over a test set.
struct CerAccumulator {
  long long edits = 0;
  long long ref_len = 0;

  void add(const std::string& hyp, const std::string& ref) {
    if (ref.empty()) throw DegenerateReference("cer: empty reference");
    edits += edit_distance(hyp, ref);
    ref_len += static_cast<long long>(ref.size());
  }

  double value() const {
    if (ref_len == 0) throw DegenerateReference("cer: no references scored");
    return static_cast<double>(edits) / static_cast<double>(ref_len);
  }
};

}  // namespace irl

#endif  // IRL_METRICS_HPP
