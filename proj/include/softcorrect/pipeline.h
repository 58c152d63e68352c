// softcorrect/pipeline.h

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

#ifndef SOFTCORRECT_PIPELINE_H_
#define SOFTCORRECT_PIPELINE_H_

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "softcorrect/config.h"
#include "softcorrect/detect.h"
#include "softcorrect/metrics.h"
#include "softcorrect/model.h"

namespace softcorrect {

// A frozen detector checkpoint wired for inference: runs the encoder and
// produces the position-wise selection according to its loss variant.
class DetectorRunner {
 public:
  DetectorRunner(std::shared_ptr<const DetectorModel> model,
                 std::string variant);

  Selection Select(const AlignedGrid& hyps_grid) const;
  const DetectorModel& model() const { return *model_; }
  const std::string& variant() const { return variant_; }

 private:
  std::shared_ptr<const DetectorModel> model_;
  std::string variant_;
};

// End-to-end correction of one sample with a detector and a corrector.
struct SentenceResult {
  Selection selection;
  std::vector<double> combined;
  std::vector<bool> flags;
  std::vector<TokenId> output;
  bool skipped = false;
  // One entry per flagged segment (constrained variant only).
  std::vector<std::vector<TokenId>> segment_outputs;
};

SentenceResult CorrectSentence(const DetectorRunner& detector,
                               const CorrectorModel* corrector,
                               const std::string& corrector_variant,
                               const Sample& sample, const AlignedGrid& grid,
                               const Vocabulary& vocab, double alpha,
                               double tau, int repeat);

struct GenDataPaths {
  std::string vocab, train, dev, test, manifest;
};

// gen-data: vocabulary + three disjoint JSONL splits + a manifest with the
// resolved config and channel statistics.  Refuses to overwrite existing
// files unless `force`.
GenDataPaths CmdGenData(const PipelineConfig& cfg, const std::string& out_dir,
                        bool force);

// train-detector: trains the configured loss variant, sweeps the detection
// threshold on dev (when enabled) and stores it in the checkpoint config.
// With `resume_path`, continues a saved run up to cfg.train.epochs.
void CmdTrainDetector(const PipelineConfig& cfg, const std::string& data_dir,
                      const std::string& out_path,
                      const std::string& resume_path = "",
                      std::ostream* log = nullptr);

// train-corrector: freezes the detector, selects candidates once, then
// trains the corrector on oracle labels with pseudo error injection.
void CmdTrainCorrector(const PipelineConfig& cfg, const std::string& data_dir,
                       const std::string& detector_path,
                       const std::string& out_path,
                       const std::string& resume_path = "",
                       std::ostream* log = nullptr);

struct EvalOutput {
  std::vector<EvalReport> rows;
  std::string json;
  std::string text;
  double detector_tau = 0.0;
  double detector_alpha = 0.0;
};

// evaluate: one report row per corrector checkpoint (plus the
// no-correction baseline).  The pseudo-corrector name "identity" yields a
// row that outputs the top hypothesis unchanged.
EvalOutput CmdEvaluate(const PipelineConfig& cfg, const std::string& data_dir,
                       const std::string& detector_path,
                       const std::vector<std::string>& corrector_paths,
                       const std::string& out_dir,
                       const std::string& split = "test",
                       std::ostream* log = nullptr);

// correct: one-shot correction of truth-less input samples; writes one
// JSON line per sentence with the selection, flags, output and skip bit.
void CmdCorrect(const PipelineConfig& cfg, const std::string& vocab_path,
                const std::string& detector_path,
                const std::string& corrector_path,
                const std::string& input_path,
                const std::string& output_path);

// Shared helpers, exposed for tests.

// Hypothesis-only alignment of a sample.
AlignedGrid BuildInferenceGrid(const Sample& sample, const Vocabulary& vocab);
// Alignment with the ground truth merged as the last row.
AlignedGrid BuildTrainingGrid(const Sample& sample, const Vocabulary& vocab);

// Loads a checkpoint, checks the compatibility hash against `cfg`, and
// reconstructs the models.
std::shared_ptr<DetectorModel> DetectorFromState(const TrainState& state);
std::shared_ptr<CorrectorModel> CorrectorFromState(const TrainState& state);
TrainState LoadCompatible(const std::string& path, const std::string& kind,
                          const PipelineConfig& cfg);

}  // namespace softcorrect

#endif  // SOFTCORRECT_PIPELINE_H_
