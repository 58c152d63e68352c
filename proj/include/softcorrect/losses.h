// softcorrect/losses.h

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

#ifndef SOFTCORRECT_LOSSES_H_
#define SOFTCORRECT_LOSSES_H_

#include <vector>

#include "softcorrect/common.h"
#include "softcorrect/numeric.h"
#include "softcorrect/vocab.h"

namespace softcorrect {

// Detector logits: one row per aligned position, |V|+1 columns (every
// vocabulary token including phi, then the GT class last).
using EncoderLogits = Mat;

struct LossResult {
  double loss = 0.0;
  Mat grad;  // same shape as the input scores
};

enum class Reduction { kMean, kSum };

// Anti-copy language model loss.  Per position t with ground truth
// y_t in V:
//   term1 = -log softmax_{V+GT}(y_t)
//   term2 = -log softmax_{(V \ y_t) + GT}(GT)
// and the total is sum_t term1 + lambda * term2 over unmasked positions
// (divided by their count under mean reduction).  `valid`, when non-empty,
// masks padding positions to exactly zero loss and gradient.
LossResult AntiCopyLoss(const EncoderLogits& logits,
                        const std::vector<TokenId>& targets,
                        const Vocabulary& vocab, double lambda,
                        Reduction reduction = Reduction::kMean,
                        const std::vector<bool>& valid = {});

// Standard cross-entropy over V only; `logits` has |V| columns, no GT.
LossResult CeLoss(const Mat& logits, const std::vector<TokenId>& targets,
                  const Vocabulary& vocab,
                  Reduction reduction = Reduction::kMean,
                  const std::vector<bool>& valid = {});

// Per-cell logistic loss on correctness scores; labels[i] is true when the
// cell holds a correct token.  Shapes of scores/labels must match.
LossResult BinaryDetectLoss(const Mat& scores,
                            const std::vector<std::vector<bool>>& labels,
                            Reduction reduction = Reduction::kMean);

// softmax over V+GT at `token`, for one position of the logits.
double TokenProbability(const EncoderLogits& logits, int position,
                        TokenId token, const Vocabulary& vocab);

}  // namespace softcorrect

#endif  // SOFTCORRECT_LOSSES_H_
