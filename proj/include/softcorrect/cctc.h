// softcorrect/cctc.h

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

#ifndef SOFTCORRECT_CCTC_H_
#define SOFTCORRECT_CCTC_H_

#include <vector>

#include "softcorrect/align.h"
#include "softcorrect/common.h"
#include "softcorrect/losses.h"
#include "softcorrect/numeric.h"

namespace softcorrect {

// Frame log-probabilities over the decoder classes: content tokens
// 0..C-1 plus the CTC blank in column C.  Rows log-sum-exp to zero.
using FrameLogProbs = Mat;

// A target span needs more output tokens than its repeated frames can
// emit; the sample must be skipped with a diagnostic.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Decoder input after error expansion.  Correct tokens become single
// anchor frames (phi anchors are dropped); each flagged token contributes
// `repeat` consecutive frames of one error segment, where a segment covers
// a maximal run of flagged positions.  `unit` identifies the CTC collapse
// unit: adjacent equal emissions merge only within one unit, so an anchor
// never absorbs a neighbouring segment emission (and vice versa).
struct ExpandedInput {
  struct Frame {
    TokenId token;    // input token, phi allowed for flagged gap positions
    int segment;      // -1 for anchors
    int slot;         // anchors: target slot (training mode), else -1
    int unit;
  };
  struct Segment {
    int span_begin = 0;  // [begin, end) into target
    int span_end = 0;
  };

  std::vector<Frame> frames;
  std::vector<Segment> segments;
  std::vector<TokenId> target;   // training mode only
  bool has_target = false;
  int repeat = 3;

  int num_frames() const { return static_cast<int>(frames.size()); }
};

// Inference-mode expansion: only tokens and flags are known.
ExpandedInput ExpandInput(const std::vector<TokenId>& candidate,
                          const std::vector<bool>& error_flags, TokenId phi,
                          int repeat);

// Training-mode expansion: labels supply the target and per-run spans
// (labels.error must equal the flags used to build them).  Throws
// CapacityError when a span cannot fit the emission capacity of its
// segment's frames.
ExpandedInput ExpandInput(const std::vector<TokenId>& candidate,
                          const OracleLabels& labels, TokenId phi, int repeat);

// The whole candidate duplicated `repeat` times as one anchor-free
// segment; with it, the constrained loss reduces to standard CTC.
ExpandedInput MakeUnconstrainedInput(const std::vector<TokenId>& candidate,
                                     const std::vector<TokenId>& target,
                                     bool has_target, int repeat);

// Negative log of the summed probability of all CTC paths that respect
// the expansion constraints and collapse to x.target:
//   - an anchor frame for slot k emits exactly y_k (blank forbidden);
//   - frames of a segment with span [l,r) may occupy only the trellis
//     states of y_l..y_{r-1} and their flanking blanks;
//   - adjacent equal emissions merge only within one collapse unit.
// Returns +inf loss (with zero gradient) when no valid path exists.
// The gradient is with respect to logp entries.
LossResult ConstrainedCtcLoss(const FrameLogProbs& logp,
                              const ExpandedInput& x);

// Classic CTC forward-backward over the same class layout, no constraints.
LossResult StandardCtcLoss(const FrameLogProbs& logp,
                           const std::vector<TokenId>& target);

// Enumeration oracle for ConstrainedCtcLoss: sums over every assignment of
// emissions to frames (anchors pinned to their token) whose collapse under
// the unit rule equals x.target.  Refuses inputs beyond T <= 8 frames or
// more than 6 decoder classes.
double BruteForceLoss(const FrameLogProbs& logp, const ExpandedInput& x);

struct DecodeResult {
  std::vector<TokenId> output;
  std::vector<std::vector<TokenId>> segment_outputs;  // one per segment
};

// Greedy constrained decoding: anchors are copied verbatim; within each
// segment the per-frame argmax is collapsed (merge adjacent repeats, drop
// blanks); segments never merge across anchors.
DecodeResult ConstrainedGreedyDecode(const FrameLogProbs& logp,
                                     const ExpandedInput& x);

}  // namespace softcorrect

#endif  // SOFTCORRECT_CCTC_H_
