// softcorrect/align.cc

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

#include "softcorrect/align.h"

#include <algorithm>

namespace softcorrect {

const std::vector<TokenId>& AlignedGrid::truth_row() const {
  SC_CHECK(has_truth, "grid has no truth row");
  return rows.back();
}

std::vector<TokenId> AlignedGrid::StripGaps(int row) const {
  std::vector<TokenId> out;
  for (TokenId t : rows[row]) {
    if (t != phi) out.push_back(t);
  }
  return out;
}

namespace {

enum Move : uint8_t { kDiag = 0, kUp = 1, kLeft = 2, kNone = 3 };

// Needleman-Wunsch over a column profile: cost of matching profile column
// i against token b_j comes from `col_sim`.  Returns the backtracked move
// sequence from (0,0) to (n,m).
std::vector<Move> ProfileAlign(
    int n, int m, const std::function<double(int, TokenId)>& col_sim,
    const std::vector<TokenId>& b) {
  std::vector<std::vector<double>> score(n + 1, std::vector<double>(m + 1));
  std::vector<std::vector<Move>> from(n + 1, std::vector<Move>(m + 1, kNone));
  for (int i = 1; i <= n; ++i) {
    score[i][0] = i * kGapScore;
    from[i][0] = kUp;
  }
  for (int j = 1; j <= m; ++j) {
    score[0][j] = j * kGapScore;
    from[0][j] = kLeft;
  }
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      double diag = score[i - 1][j - 1] + col_sim(i - 1, b[j - 1]);
      double up = score[i - 1][j] + kGapScore;
      double left = score[i][j - 1] + kGapScore;
      // Tie preference: diagonal, then consuming the profile.
      double best = diag;
      Move mv = kDiag;
      if (up > best) {
        best = up;
        mv = kUp;
      }
      if (left > best) {
        best = left;
        mv = kLeft;
      }
      score[i][j] = best;
      from[i][j] = mv;
    }
  }
  std::vector<Move> path;
  int i = n, j = m;
  while (i > 0 || j > 0) {
    Move mv = from[i][j];
    path.push_back(mv);
    switch (mv) {
      case kDiag:
        --i;
        --j;
        break;
      case kUp:
        --i;
        break;
      case kLeft:
        --j;
        break;
      case kNone:
        SC_CHECK(false, "broken backtrack");
    }
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

AlignedGrid MergeRow(const AlignedGrid& grid, const std::vector<TokenId>& seq,
                     const SimilarityFn& sim, bool as_truth,
                     std::vector<int>* col_map) {
  SC_CHECK(!grid.has_truth, "cannot merge into a grid with a truth row");
  SC_CHECK(!seq.empty(), "cannot align an empty sequence");
  const int rows = grid.num_rows();
  const int n = grid.length();
  auto col_sim = [&](int col, TokenId token) {
    double total = 0.0;
    for (int r = 0; r < rows; ++r) total += sim(grid.rows[r][col], token);
    return total / rows;
  };
  std::vector<Move> path =
      ProfileAlign(n, static_cast<int>(seq.size()), col_sim, seq);

  AlignedGrid out;
  out.phi = grid.phi;
  out.has_truth = as_truth;
  out.rows.assign(rows + 1, {});
  out.origins.assign(rows + 1, {});
  if (col_map) col_map->clear();
  int i = 0, j = 0;
  for (Move mv : path) {
    if (mv == kDiag || mv == kUp) {
      // Existing column survives.
      if (col_map) col_map->push_back(static_cast<int>(out.rows[0].size()));
      for (int r = 0; r < rows; ++r) {
        out.rows[r].push_back(grid.rows[r][i]);
        out.origins[r].push_back(grid.origins[r][i]);
      }
      out.rows[rows].push_back(mv == kDiag ? seq[j] : grid.phi);
      out.origins[rows].push_back(mv == kDiag ? j : -1);
      ++i;
      if (mv == kDiag) ++j;
    } else {
      // Fresh column for seq[j]; all existing rows take phi.
      for (int r = 0; r < rows; ++r) {
        out.rows[r].push_back(grid.phi);
        out.origins[r].push_back(-1);
      }
      out.rows[rows].push_back(seq[j]);
      out.origins[rows].push_back(j);
      ++j;
    }
  }
  return out;
}

std::pair<std::vector<TokenId>, std::vector<TokenId>> AlignPair(
    const std::vector<TokenId>& a, const std::vector<TokenId>& b,
    const SimilarityFn& sim, TokenId phi) {
  SC_CHECK(!a.empty() && !b.empty(), "AlignPair: sequences must be non-empty");
  AlignedGrid seed;
  seed.phi = phi;
  seed.rows.push_back(a);
  seed.origins.emplace_back();
  for (size_t i = 0; i < a.size(); ++i)
    seed.origins[0].push_back(static_cast<int>(i));
  AlignedGrid merged = MergeRow(seed, b, sim, /*as_truth=*/false);
  return {merged.rows[0], merged.rows[1]};
}

AlignedGrid AlignMulti(const std::vector<std::vector<TokenId>>& hyps,
                       const SimilarityFn& sim, TokenId phi) {
  SC_CHECK(!hyps.empty(), "AlignMulti: need at least one hypothesis");
  AlignedGrid grid;
  grid.phi = phi;
  grid.rows.push_back(hyps[0]);
  grid.origins.emplace_back();
  for (size_t i = 0; i < hyps[0].size(); ++i)
    grid.origins[0].push_back(static_cast<int>(i));
  for (size_t k = 1; k < hyps.size(); ++k)
    grid = MergeRow(grid, hyps[k], sim, /*as_truth=*/false);
  return grid;
}

AlignedGrid HypsOnly(const AlignedGrid& grid) {
  AlignedGrid out = grid;
  if (out.has_truth) {
    out.rows.pop_back();
    out.origins.pop_back();
    out.has_truth = false;
  }
  return out;
}

OracleLabels SpansFromFlags(const AlignedGrid& grid,
                            const std::vector<TokenId>& selected,
                            const std::vector<bool>& flags) {
  const std::vector<TokenId>& truth = grid.truth_row();
  const int n = grid.length();
  SC_CHECK(static_cast<int>(selected.size()) == n,
           "selected length differs from grid length");
  SC_CHECK(static_cast<int>(flags.size()) == n,
           "flags length differs from grid length");
  OracleLabels out;
  out.error = flags;
  for (int t = 0; t < n; ++t) {
    if (!flags[t] && selected[t] != truth[t])
      throw std::logic_error("unflagged column disagrees with the truth row");
  }
  for (int t = 0; t < n; ++t) {
    if (flags[t] && (t == 0 || !flags[t - 1])) {
      OracleLabels::Run run;
      run.begin_col = t;
      int e = t;
      while (e < n && flags[e]) ++e;
      run.end_col = e;
      run.span_begin = -1;  // filled below
      out.runs.push_back(run);
    }
  }
  size_t next_run = 0;
  for (int t = 0; t < n; ++t) {
    if (next_run < out.runs.size() && out.runs[next_run].begin_col == t)
      out.runs[next_run].span_begin = static_cast<int>(out.target.size());
    if (truth[t] != grid.phi) out.target.push_back(truth[t]);
    if (next_run < out.runs.size() && out.runs[next_run].end_col == t + 1) {
      out.runs[next_run].span_end = static_cast<int>(out.target.size());
      ++next_run;
    }
  }
  return out;
}

OracleLabels ComputeOracleLabels(const AlignedGrid& grid,
                                 const std::vector<TokenId>& selected) {
  const std::vector<TokenId>& truth = grid.truth_row();
  const int n = grid.length();
  SC_CHECK(static_cast<int>(selected.size()) == n,
           "selected length differs from grid length");
  std::vector<bool> flags(n);
  for (int t = 0; t < n; ++t) flags[t] = selected[t] != truth[t];
  return SpansFromFlags(grid, selected, flags);
}

}  // namespace softcorrect
