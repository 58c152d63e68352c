// softcorrect/metrics.cc

// Copyright 2026  SoftCorrect Authors

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

#include "softcorrect/metrics.h"

#include <algorithm>

namespace softcorrect {

int64_t EditDistance(const std::vector<TokenId>& a,
                     const std::vector<TokenId>& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<int64_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      int64_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double Cer(const std::vector<TokenId>& hyp, const std::vector<TokenId>& ref) {
  if (ref.empty())
    throw std::invalid_argument("Cer: reference must be non-empty");
  return static_cast<double>(EditDistance(hyp, ref)) /
         static_cast<double>(ref.size());
}

double Cerr(double cer_corrected, double cer_baseline) {
  if (!(cer_baseline > 0.0))
    throw std::invalid_argument("Cerr: baseline CER must be positive");
  return (cer_baseline - cer_corrected) / cer_baseline * 100.0;
}

PrfResult DetectionPrf(const PrfCounts& counts) {
  PrfResult r;
  r.counts = counts;
  if (counts.tp + counts.fp > 0) {
    r.precision = static_cast<double>(counts.tp) / (counts.tp + counts.fp);
    r.precision_defined = true;
  }
  if (counts.tp + counts.fn > 0) {
    r.recall = static_cast<double>(counts.tp) / (counts.tp + counts.fn);
    r.recall_defined = true;
  }
  if (r.precision_defined && r.recall_defined && r.precision + r.recall > 0) {
    r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
    r.f1_defined = true;
  }
  return r;
}

PrfResult DetectionPrf(const std::vector<bool>& flags,
                       const std::vector<bool>& oracle) {
  SC_CHECK(flags.size() == oracle.size(),
           "flags and oracle must have the same length");
  PrfCounts counts;
  for (size_t i = 0; i < flags.size(); ++i) counts.Add(flags[i], oracle[i]);
  return DetectionPrf(counts);
}

double CorrectionPrecision(const CorrectionCounts& counts, bool* defined) {
  if (counts.attempted == 0) {
    if (defined) *defined = false;
    return 0.0;
  }
  if (defined) *defined = true;
  return static_cast<double>(counts.matched) / counts.attempted;
}

}  // namespace softcorrect
