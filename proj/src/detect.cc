// softcorrect/detect.cc

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

#include "softcorrect/detect.h"

#include <algorithm>

namespace softcorrect {

namespace {

// Shared column scan: `token_prob(row, token)` scores one candidate.
template <typename ProbFn>
Selection SelectImpl(const AlignedGrid& grid, const ProbFn& token_prob) {
  SC_CHECK(!grid.has_truth, "selection runs on hypothesis-only grids");
  const int length = grid.length();
  const int rows = grid.num_rows();
  Selection out;
  out.selected.resize(length);
  out.source.resize(length);
  out.enc_prob.resize(length);
  for (int t = 0; t < length; ++t) {
    TokenId best_token = -1;
    int best_row = -1;
    double best_prob = -1.0;
    for (int r = 0; r < rows; ++r) {
      const TokenId tok = grid.rows[r][t];
      bool seen = false;
      for (int q = 0; q < r; ++q) {
        if (grid.rows[q][t] == tok) {
          seen = true;
          break;
        }
      }
      if (seen) continue;  // candidate set is a set; first row owns the token
      const double p = token_prob(r, t, tok);
      if (p > best_prob) {
        best_prob = p;
        best_token = tok;
        best_row = r;
      }
    }
    out.selected[t] = best_token;
    out.enc_prob[t] = best_prob;
    out.source[t] = best_token == grid.phi ? -1 : best_row;
  }
  return out;
}

}  // namespace

Selection SelectCandidate(const AlignedGrid& grid, const Mat& probs) {
  SC_CHECK(probs.rows() == grid.length(), "probs rows differ from grid length");
  return SelectImpl(grid, [&](int /*row*/, int t, TokenId tok) {
    SC_CHECK(tok >= 0 && tok < probs.cols(), "token outside probs columns");
    return probs(t, tok);
  });
}

Selection SelectCandidateWithCellScores(const AlignedGrid& grid,
                                        const Mat& cell_probs) {
  SC_CHECK(cell_probs.rows() == grid.length(),
           "cell_probs rows differ from grid length");
  SC_CHECK(cell_probs.cols() >= grid.num_rows(),
           "cell_probs columns differ from grid rows");
  return SelectImpl(grid, [&](int row, int t, TokenId tok) {
    // Best correctness score among the rows holding this token.
    double best = cell_probs(t, row);
    for (int r = row + 1; r < grid.num_rows(); ++r) {
      if (grid.rows[r][t] == tok) best = std::max(best, cell_probs(t, r));
    }
    return best;
  });
}

std::vector<double> GatherAsrPosteriors(const AlignedGrid& grid,
                                        const Selection& selection,
                                        const Sample& sample) {
  const int length = grid.length();
  std::vector<double> asr(length, 0.0);
  for (int t = 0; t < length; ++t) {
    const int row = selection.source[t];
    if (row < 0) continue;
    const int pos = grid.origins[row][t];
    SC_CHECK(pos >= 0, "non-gap selection with a gap origin");
    SC_CHECK(row < static_cast<int>(sample.hyps.size()),
             "selection row outside the sample");
    asr[t] = sample.hyps[row].posteriors[pos];
  }
  return asr;
}

std::vector<double> CombineScores(const std::vector<double>& enc_prob,
                                  const std::vector<double>& asr_prob,
                                  const std::vector<int>& source,
                                  double alpha) {
  if (alpha < 0.0 || alpha > 1.0)
    throw ConfigError("alpha must lie in [0,1]");
  SC_CHECK(enc_prob.size() == asr_prob.size() &&
               enc_prob.size() == source.size(),
           "combine inputs must share one length");
  std::vector<double> combined(enc_prob.size());
  for (size_t t = 0; t < enc_prob.size(); ++t) {
    combined[t] = source[t] < 0
                      ? enc_prob[t]
                      : alpha * enc_prob[t] + (1.0 - alpha) * asr_prob[t];
  }
  return combined;
}

std::vector<bool> FlagErrors(const std::vector<double>& combined, double tau) {
  if (tau < 0.0 || tau > 1.0) throw ConfigError("tau must lie in [0,1]");
  std::vector<bool> flags(combined.size());
  for (size_t t = 0; t < combined.size(); ++t) flags[t] = combined[t] < tau;
  return flags;
}

std::vector<bool> InjectPseudoErrors(const std::vector<bool>& flags,
                                     double rate, Rng* rng) {
  if (rate < 0.0 || rate >= 1.0)
    throw ConfigError("pseudo error rate must lie in [0,1)");
  std::vector<bool> out = flags;
  for (size_t t = 0; t < out.size(); ++t) {
    if (!out[t] && rng->Uniform() < rate) out[t] = true;
  }
  return out;
}

bool ShouldSkipDecoder(const std::vector<bool>& flags) {
  return std::none_of(flags.begin(), flags.end(), [](bool f) { return f; });
}

DetectionOutcome Detect(const AlignedGrid& grid, const Selection& selection,
                        const Sample& sample, double alpha, double tau) {
  DetectionOutcome out;
  out.selection = selection;
  out.asr_prob = GatherAsrPosteriors(grid, selection, sample);
  out.combined =
      CombineScores(selection.enc_prob, out.asr_prob, selection.source, alpha);
  out.flags = FlagErrors(out.combined, tau);
  return out;
}

}  // namespace softcorrect
