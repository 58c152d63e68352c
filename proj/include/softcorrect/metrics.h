// softcorrect/metrics.h

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

#ifndef SOFTCORRECT_METRICS_H_
#define SOFTCORRECT_METRICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "softcorrect/common.h"

namespace softcorrect {

// Uniform-cost Levenshtein distance over token ids.
int64_t EditDistance(const std::vector<TokenId>& a,
                     const std::vector<TokenId>& b);

// Edit distance divided by the reference length; the reference must be
// non-empty.
double Cer(const std::vector<TokenId>& hyp, const std::vector<TokenId>& ref);

// Relative CER reduction in percent: (baseline - corrected)/baseline * 100.
double Cerr(double cer_corrected, double cer_baseline);

struct PrfCounts {
  int64_t tp = 0, fp = 0, fn = 0;

  void Add(bool flagged, bool oracle_error) {
    if (flagged && oracle_error) ++tp;
    if (flagged && !oracle_error) ++fp;
    if (!flagged && oracle_error) ++fn;
  }
  void Merge(const PrfCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
  }
};

// Precision/recall/F1 over ERROR labels.  Undefined ratios (zero
// denominators) are reported as 0 with the matching *_defined flag unset.
struct PrfResult {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  bool precision_defined = false, recall_defined = false, f1_defined = false;
  PrfCounts counts;
};

PrfResult DetectionPrf(const PrfCounts& counts);
PrfResult DetectionPrf(const std::vector<bool>& flags,
                       const std::vector<bool>& oracle);

// Segment-wise correction precision: of the flagged segments containing at
// least one oracle error, the fraction whose decoded output equals the
// oracle target span.
struct CorrectionCounts {
  int64_t attempted = 0;
  int64_t matched = 0;

  void Add(const std::vector<TokenId>& decoded,
           const std::vector<TokenId>& oracle_span) {
    ++attempted;
    if (decoded == oracle_span) ++matched;
  }
  void Merge(const CorrectionCounts& o) {
    attempted += o.attempted;
    matched += o.matched;
  }
};

double CorrectionPrecision(const CorrectionCounts& counts, bool* defined);

// Corpus-level accumulators and the report emitted by evaluation.
struct EvalReport {
  std::string variant;
  double cer = 0.0;
  double cer_baseline = 0.0;
  double cerr = 0.0;
  PrfResult detection;
  double p_cor = 0.0;
  bool p_cor_defined = false;
  CorrectionCounts correction;
  int64_t sentences = 0;
  int64_t skipped_sentences = 0;   // decoder fast path taken
  int64_t edit_errors = 0;         // summed edit distance of outputs
  int64_t baseline_errors = 0;
  int64_t ref_tokens = 0;
  double skip_rate() const {
    return sentences ? static_cast<double>(skipped_sentences) / sentences : 0;
  }
};

}  // namespace softcorrect

#endif  // SOFTCORRECT_METRICS_H_
