// softcorrect/detect.h

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

#ifndef SOFTCORRECT_DETECT_H_
#define SOFTCORRECT_DETECT_H_

#include <vector>

#include "softcorrect/align.h"
#include "softcorrect/common.h"
#include "softcorrect/corpus.h"
#include "softcorrect/numeric.h"

namespace softcorrect {

// Position-wise choice from the aligned candidates.  source[t] is the
// lowest-rank row the selected token appears in, or -1 (gap) when phi was
// selected; enc_prob[t] is the detector probability of the chosen token.
struct Selection {
  std::vector<TokenId> selected;
  std::vector<int> source;
  std::vector<double> enc_prob;
};

// probs: per-position probabilities indexed by token id (softmax rows of
// the detector logits; only columns < |V| are consulted).  Per column the
// candidate set is the distinct tokens present there; the highest-
// probability candidate wins, ties to the lowest row.
Selection SelectCandidate(const AlignedGrid& grid, const Mat& probs);

// Binary-detector flavour: cell_probs (L x K) holds per-cell correctness
// probabilities; a token's score in a column is the best score among rows
// holding it.
Selection SelectCandidateWithCellScores(const AlignedGrid& grid,
                                        const Mat& cell_probs);

// Per-position recognizer posterior of the selected token, taken from its
// source row; 0 where the source is a gap.
std::vector<double> GatherAsrPosteriors(const AlignedGrid& grid,
                                        const Selection& selection,
                                        const Sample& sample);

// alpha * enc + (1 - alpha) * asr; positions without a recognizer
// posterior (source < 0) keep the encoder probability alone.
std::vector<double> CombineScores(const std::vector<double>& enc_prob,
                                  const std::vector<double>& asr_prob,
                                  const std::vector<int>& source,
                                  double alpha);

// ERROR exactly when combined < tau.
std::vector<bool> FlagErrors(const std::vector<double>& combined, double tau);

// Training-time robustness: flips each CORRECT flag to ERROR independently
// with probability `rate`; existing ERROR flags are untouched.
std::vector<bool> InjectPseudoErrors(const std::vector<bool>& flags,
                                     double rate, Rng* rng);

// True when nothing is flagged; the pipeline then emits the phi-stripped
// selected candidate without running the decoder.
bool ShouldSkipDecoder(const std::vector<bool>& flags);

// Selection plus combined scores and flags, as used at inference time.
struct DetectionOutcome {
  Selection selection;
  std::vector<double> asr_prob;
  std::vector<double> combined;
  std::vector<bool> flags;
};

DetectionOutcome Detect(const AlignedGrid& grid, const Selection& selection,
                        const Sample& sample, double alpha, double tau);

}  // namespace softcorrect

#endif  // SOFTCORRECT_DETECT_H_
