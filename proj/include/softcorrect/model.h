// softcorrect/model.h

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

#ifndef SOFTCORRECT_MODEL_H_
#define SOFTCORRECT_MODEL_H_

#include <memory>
#include <string>
#include <vector>

#include "softcorrect/align.h"
#include "softcorrect/cctc.h"
#include "softcorrect/common.h"
#include "softcorrect/numeric.h"

namespace softcorrect {

struct ModelConfig {
  int layers = 2;
  int dim = 64;
  int heads = 4;
  int ffn = 256;
  int k = 4;          // candidate rows consumed by the detector
  int max_len = 160;
  int vocab_content = 0;  // C; phi gets id C

  void Validate() const;
  int input_tokens() const { return vocab_content + 1; }     // V
  int detector_classes() const { return vocab_content + 2; } // V + GT
  int decoder_classes() const { return vocab_content + 1; }  // V' + blank
};

// Named views over one flat parameter vector.  The flat layout makes the
// optimizer, gradient clipping, checkpointing and finite-difference
// probing uniform.
class ParamLayout {
 public:
  int Add(const std::string& name, int rows, int cols);
  struct Entry {
    std::string name;
    int offset, rows, cols;
  };
  const std::vector<Entry>& entries() const { return entries_; }
  int total_size() const { return total_; }

 private:
  std::vector<Entry> entries_;
  int total_ = 0;
};

class ParamStore {
 public:
  ParamStore() = default;
  explicit ParamStore(std::shared_ptr<const ParamLayout> layout);

  Eigen::Map<Mat> M(int handle);
  Eigen::Map<const Mat> M(int handle) const;
  Vec& flat() { return data_; }
  const Vec& flat() const { return data_; }
  const ParamLayout& layout() const { return *layout_; }
  std::shared_ptr<const ParamLayout> layout_ptr() const { return layout_; }
  void SetZero() { data_.setZero(); }

 private:
  std::shared_ptr<const ParamLayout> layout_;
  Vec data_;
};

// Shared post-LN transformer encoder stack (self-attention + ReLU FFN).
class TransformerCore {
 public:
  struct LayerTrace {
    Mat x_in, q, k, v, att_concat;
    std::vector<Mat> att;  // per-head softmax weights
    Mat ln1_xhat, ln1_out, ffn_h, ln2_xhat;
    Vec ln1_rstd, ln2_rstd;
  };
  struct Trace {
    std::vector<LayerTrace> layers;
  };

  TransformerCore() = default;
  TransformerCore(const ModelConfig& cfg, ParamLayout* layout,
                  const std::string& prefix);

  Mat Forward(const Mat& x0, const ParamStore& p, Trace* trace) const;
  // Returns the gradient w.r.t. x0; accumulates parameter gradients.
  Mat Backward(const Mat& grad_out, const ParamStore& p, const Trace& trace,
               ParamStore* grads) const;

 private:
  struct LayerHandles {
    int wq, bq, wk, bk, wv, bv, wo, bo;
    int ln1g, ln1b, w1, b1, w2, b2, ln2g, ln2b;
  };
  ModelConfig cfg_;
  std::vector<LayerHandles> layers_;
};

// Parameter initialization shared by both models: Xavier-uniform matrices,
// small normal embeddings, zero biases, unit layer-norm gains.
void InitParams(ParamStore* params, Rng* rng);

// Error detector.  Input: the K candidate rows of an aligned grid (fewer
// rows are padded with copies of row 0).  Per position the K token
// embeddings are concatenated, projected to the model width and passed
// through the transformer stack; the output head is the tied embedding
// matrix extended with a learned GT row.  A small per-row head produces
// the binary-variant correctness scores.
class DetectorModel {
 public:
  struct TraceT {
    std::vector<std::vector<TokenId>> rows;  // padded to k
    Mat concat;                              // L x k*dim
    TransformerCore::Trace core;
    Mat h;                                   // L x dim
  };
  struct Output {
    Mat logits;      // L x (|V|+1)
    Mat bin_scores;  // L x k
  };

  explicit DetectorModel(const ModelConfig& cfg);

  Output Forward(const std::vector<std::vector<TokenId>>& rows,
                 TraceT* trace) const;
  // Either gradient may be empty (treated as zero).
  void Backward(const TraceT& trace, const Mat& grad_logits,
                const Mat& grad_bin, ParamStore* grads) const;

  const ModelConfig& config() const { return cfg_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  std::shared_ptr<const ParamLayout> layout() const { return layout_; }

 private:
  ModelConfig cfg_;
  std::shared_ptr<const ParamLayout> layout_;
  ParamStore params_;
  TransformerCore core_;
  int embed_, w_in_, b_in_, pos_, gt_row_, bin_w_, bin_b_;
};

// Focused corrector: embeds each frame token plus an anchor/error tag,
// runs the transformer stack and emits per-frame log-probabilities over
// content tokens + blank (untied head).
class CorrectorModel {
 public:
  struct TraceT {
    std::vector<TokenId> tokens;
    std::vector<int> tags;  // 0 anchor, 1 error
    TransformerCore::Trace core;
    Mat h;     // T x dim
    Mat logp;  // T x (C+1)
  };

  explicit CorrectorModel(const ModelConfig& cfg);

  FrameLogProbs Forward(const ExpandedInput& x, TraceT* trace) const;
  void Backward(const TraceT& trace, const Mat& grad_logp,
                ParamStore* grads) const;

  const ModelConfig& config() const { return cfg_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  std::shared_ptr<const ParamLayout> layout() const { return layout_; }

 private:
  ModelConfig cfg_;
  std::shared_ptr<const ParamLayout> layout_;
  ParamStore params_;
  TransformerCore core_;
  int embed_, tag_, pos_, w_out_, b_out_;
};

// Adam with linear warmup and clip-by-global-norm.  Steps with non-finite
// gradients are rejected and counted.
struct OptimizerConfig {
  double lr = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 1.0;
  int warmup_steps = 200;
};

class AdamOptimizer {
 public:
  AdamOptimizer(const OptimizerConfig& cfg, int param_count);

  bool Step(Vec* params, const Vec& grads);
  int64_t steps_done() const { return t_; }
  uint64_t rejected_steps() const { return rejected_; }

  Vec m_, v_;
  int64_t t_ = 0;
  uint64_t rejected_ = 0;
  OptimizerConfig cfg_;
};

// Serializable training snapshot; round-trips byte-exactly.
struct TrainState {
  std::string kind;         // "detector" or "corrector"
  std::string config_json;  // full resolved pipeline config
  uint64_t compat_hash = 0; // architecture/vocab compatibility
  Vec params;
  Vec adam_m, adam_v;
  int64_t adam_t = 0;
  int epochs_done = 0;
  uint64_t rejected_steps = 0;
  uint64_t capacity_skipped = 0;
  std::string rng_state;
};

void SaveCheckpoint(const TrainState& state, const std::string& path);
TrainState LoadCheckpoint(const std::string& path);

}  // namespace softcorrect

#endif  // SOFTCORRECT_MODEL_H_
