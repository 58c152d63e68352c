// softcorrect/align.h

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

#ifndef SOFTCORRECT_ALIGN_H_
#define SOFTCORRECT_ALIGN_H_

#include <functional>
#include <utility>
#include <vector>

#include "softcorrect/common.h"
#include "softcorrect/vocab.h"

namespace softcorrect {

// Token pair similarity in [0,1].  The default (Vocabulary::Similarity)
// scores 1 for identical tokens and 0.5 for homophone-group mates.
using SimilarityFn = std::function<double(TokenId, TokenId)>;

// Score of aligning a token against a gap.  Chosen so that a substitution
// (>= 0) always beats a deletion+insertion pair (2 * kGapScore) and an
// identical match always beats gapping both tokens.
constexpr double kGapScore = -0.5;

// K rows padded to a common length with the phi gap token.  `origins`
// mirrors `rows`: the source position of each cell in its original
// sequence, or -1 for phi fills.  When `has_truth` is set the last row is
// the aligned ground truth (data-prep only, never model input).
struct AlignedGrid {
  std::vector<std::vector<TokenId>> rows;
  std::vector<std::vector<int>> origins;
  TokenId phi = -1;
  bool has_truth = false;

  int num_rows() const { return static_cast<int>(rows.size()); }
  int length() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }
  int num_hyps() const { return num_rows() - (has_truth ? 1 : 0); }
  const std::vector<TokenId>& truth_row() const;
  // Row k with phi cells removed; recovers the original sequence.
  std::vector<TokenId> StripGaps(int row) const;
};

// Global alignment of two sequences, maximizing sum of pair similarities
// with kGapScore per gap.  Ties prefer diagonal moves, then consuming `a`.
std::pair<std::vector<TokenId>, std::vector<TokenId>> AlignPair(
    const std::vector<TokenId>& a, const std::vector<TokenId>& b,
    const SimilarityFn& sim, TokenId phi);

// Progressive alignment: hypothesis 0 seeds the grid, later hypotheses are
// aligned against the mean-similarity column profile.
AlignedGrid AlignMulti(const std::vector<std::vector<TokenId>>& hyps,
                       const SimilarityFn& sim, TokenId phi);

// Aligns one more sequence into the grid as a new last row.  Existing
// columns keep their order; `col_map` (optional) receives, for each old
// column, its index in the merged grid.
AlignedGrid MergeRow(const AlignedGrid& grid, const std::vector<TokenId>& seq,
                     const SimilarityFn& sim, bool as_truth,
                     std::vector<int>* col_map = nullptr);

// Grid restricted to the hypothesis rows (same columns).
AlignedGrid HypsOnly(const AlignedGrid& grid);

// Per-column labels of a selected token sequence against the truth row,
// plus the CTC target and per-error-run target spans.
struct OracleLabels {
  std::vector<bool> error;       // error[t]: selected[t] != truth[t]
  std::vector<TokenId> target;   // truth row with phi removed
  struct Run {
    int begin_col, end_col;      // [begin, end) columns of the error run
    int span_begin, span_end;    // [begin, end) into target
  };
  std::vector<Run> runs;
};

// Requires grid.has_truth; `selected` has one token per column.
OracleLabels ComputeOracleLabels(const AlignedGrid& grid,
                                 const std::vector<TokenId>& selected);

// Recomputes target spans for an arbitrary flag vector (e.g. after pseudo
// error injection): each maximal flagged run receives the truth content of
// its columns.  Flags must keep every mismatch flagged; anchors (unflagged
// columns) must match the truth row.
OracleLabels SpansFromFlags(const AlignedGrid& grid,
                            const std::vector<TokenId>& selected,
                            const std::vector<bool>& flags);

}  // namespace softcorrect

#endif  // SOFTCORRECT_ALIGN_H_
