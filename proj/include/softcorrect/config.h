// softcorrect/config.h

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

#ifndef SOFTCORRECT_CONFIG_H_
#define SOFTCORRECT_CONFIG_H_

#include <cstdint>
#include <string>

#include "softcorrect/corpus.h"
#include "softcorrect/model.h"

namespace softcorrect {

// Resolved run configuration.  Serialized verbatim into checkpoints,
// manifests and reports; missing JSON keys take the defaults below,
// unknown keys are rejected.
struct PipelineConfig {
  uint64_t seed = 1;

  struct Data {
    int content_tokens = 60;
    int group_size = 4;
    int len_min = 8;
    int len_max = 20;
    int train = 20000;
    int dev = 2000;
    int test = 2000;
    int k = 4;
    NoiseConfig noise;
    PosteriorModel posterior;
  } data;

  struct Model {
    int layers = 2;
    int dim = 64;
    int heads = 4;
    int ffn = 256;
    int max_len = 160;
  } model;

  struct Train {
    int epochs = 1;
    int batch_size = 32;
    double lr = 2e-3;
    int warmup_steps = 200;
    double clip_norm = 1.0;
    double pseudo_error_rate = 0.05;
    int workers = 2;
  } train;

  struct Detect {
    double alpha = 0.5;
    double threshold = 0.5;
    bool sweep_threshold = true;
  } detect;

  struct Loss {
    std::string variant = "anti_copy";  // anti_copy | ce | binary
    double lambda = 1.0;
  } loss;

  struct Correct {
    std::string variant = "constrained";  // constrained | unconstrained
    int repeat = 3;
  } correct;

  struct Eval {
    int workers = 2;
  } eval;

  void Validate() const;
  std::string ToJson() const;
  static PipelineConfig FromJson(const std::string& text,
                                 const std::string& where);
  static PipelineConfig LoadFile(const std::string& path);

  ModelConfig MakeModelConfig() const;
  OptimizerConfig MakeOptimizerConfig() const;
  // Architecture/vocabulary fingerprint; checkpoints refuse to load when
  // it differs.
  uint64_t CompatHash(const std::string& kind) const;
};

}  // namespace softcorrect

#endif  // SOFTCORRECT_CONFIG_H_
