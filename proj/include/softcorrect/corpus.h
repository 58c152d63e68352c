// softcorrect/corpus.h

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

#ifndef SOFTCORRECT_CORPUS_H_
#define SOFTCORRECT_CORPUS_H_

#include <string>
#include <vector>

#include "softcorrect/common.h"
#include "softcorrect/vocab.h"

namespace softcorrect {

// One recognition hypothesis: tokens plus a per-token posterior in (0,1]
// standing in for the recognizer's confidence.
struct Hypothesis {
  std::vector<TokenId> tokens;
  std::vector<double> posteriors;

  bool operator==(const Hypothesis&) const = default;
};

// Ground truth plus K hypotheses, rank 0 first.  `truth` may be empty for
// inference-only inputs.
struct Sample {
  std::vector<TokenId> truth;
  std::vector<Hypothesis> hyps;

  bool operator==(const Sample&) const = default;
};

using Corpus = std::vector<Sample>;

// Stochastic corruption channel.  A position is deleted with p_del,
// receives an inserted token after it with p_ins, and is substituted with
// p_sub; the substitution type follows `mix` (keep / mask / homophone /
// random), where mask and random both draw a uniform content token
// different from the original and homophone draws an in-group mate.
// homophone_frac, when >= 0, overrides the homophone share of `mix` and
// rescales the other three entries.
struct NoiseConfig {
  double p_sub = 0.08;
  double p_del = 0.01;
  double p_ins = 0.01;
  double mix_keep = 0.10;
  double mix_mask = 0.40;
  double mix_homophone = 0.40;
  double mix_random = 0.10;
  double homophone_frac = -1.0;  // unset

  void Validate() const;
};

// Beta posterior simulator with a correlation knob: each sample draws one
// master corruption plan, and every hypothesis reuses the master operation
// at a position with probability error_correlation (fresh draw otherwise).
struct PosteriorModel {
  double beta_correct_a = 8.0;
  double beta_correct_b = 2.0;
  double beta_error_a = 2.0;
  double beta_error_b = 4.0;
  double error_correlation = 0.5;

  void Validate() const;
};

enum class EditKind { kKeep, kSub, kDel, kIns };

// One realized channel operation.  `truth_pos` is the position in the
// ground truth the operation applies to; `token` is the emitted token for
// keep/sub/ins and the removed token for del.
struct EditOp {
  EditKind kind;
  int truth_pos;
  TokenId token;
};

struct CorruptResult {
  std::vector<TokenId> tokens;
  std::vector<EditOp> ops;  // one per truth position, plus one per insertion
};

struct TruthConfig {
  int count = 0;
  int len_min = 1;
  int len_max = 1;
};

// Uniform random sentences over the content vocabulary, lengths uniform in
// [len_min, len_max].  Pure function of (rng state, config).
std::vector<std::vector<TokenId>> GenerateTruth(Rng* rng,
                                                const TruthConfig& config,
                                                const Vocabulary& vocab);

// Runs the channel once over `truth`.
CorruptResult Corrupt(const std::vector<TokenId>& truth, Rng* rng,
                      const NoiseConfig& noise, const Vocabulary& vocab);

// Builds a Sample with K correlated hypotheses; rank 0 is the hypothesis
// with the fewest realized errors (ties by generation order).
Sample SimulateNBest(const std::vector<TokenId>& truth, Rng* rng, int k,
                     const NoiseConfig& noise, const PosteriorModel& model,
                     const Vocabulary& vocab);

// JSON-lines corpus: one sample per line,
//   {"truth":[ids],"hyps":[{"tokens":[ids],"post":[floats]},...]}
// Reading validates token ranges against `vocab` and rejects phi/blank in
// sequences.  With require_truth=false, lines may omit "truth".
Corpus ReadCorpus(const std::string& path, const Vocabulary& vocab,
                  bool require_truth = true);
void WriteCorpus(const std::string& path, const Corpus& corpus);

// In-memory counterparts used by the file API and by tests.
std::string SerializeSample(const Sample& sample);
Sample ParseSampleLine(const std::string& line, const Vocabulary& vocab,
                       bool require_truth, const std::string& where);

}  // namespace softcorrect

#endif  // SOFTCORRECT_CORPUS_H_
