// softcorrect/softcorrect_main.cc

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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "softcorrect/pipeline.h"

namespace {

using softcorrect::PipelineConfig;

PipelineConfig ResolveConfig(const std::string& config_path,
                             std::optional<uint64_t> seed,
                             const std::string& loss_variant,
                             const std::string& correct_variant) {
  PipelineConfig cfg = config_path.empty()
                           ? PipelineConfig()
                           : PipelineConfig::LoadFile(config_path);
  if (seed) cfg.seed = *seed;
  if (!loss_variant.empty()) cfg.loss.variant = loss_variant;
  if (!correct_variant.empty()) cfg.correct.variant = correct_variant;
  cfg.Validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "N-best transcript error correction: soft detection with an anti-copy "
      "language-model detector and a constrained-CTC corrector"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<uint64_t> seed;
  app.add_option("--config", config_path, "JSON config file")
      ->configurable(false);
  app.add_option("--seed", seed, "override config seed");

  // gen-data
  auto* gen = app.add_subcommand("gen-data",
                                 "generate vocabulary and train/dev/test "
                                 "splits with a manifest");
  std::string gen_out = "data";
  bool gen_force = false;
  gen->add_option("--out", gen_out, "output directory");
  gen->add_flag("--force", gen_force, "overwrite existing files");

  // train-detector
  auto* td = app.add_subcommand("train-detector",
                                "train the error detector (encoder)");
  std::string td_data = "data", td_out = "detector.ckpt", td_resume;
  std::string td_variant;
  td->add_option("--data", td_data, "data directory from gen-data");
  td->add_option("--out", td_out, "checkpoint path");
  td->add_option("--resume", td_resume, "checkpoint to resume from");
  td->add_option("--variant", td_variant,
                 "loss variant: anti_copy | ce | binary");

  // train-corrector
  auto* tc = app.add_subcommand("train-corrector",
                                "train the focused corrector (decoder)");
  std::string tc_data = "data", tc_det = "detector.ckpt",
              tc_out = "corrector.ckpt", tc_resume;
  std::string tc_variant;
  tc->add_option("--data", tc_data, "data directory from gen-data");
  tc->add_option("--detector", tc_det, "trained detector checkpoint");
  tc->add_option("--out", tc_out, "checkpoint path");
  tc->add_option("--resume", tc_resume, "checkpoint to resume from");
  tc->add_option("--variant", tc_variant,
                 "correction variant: constrained | unconstrained");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "evaluate checkpoints on a split");
  std::string ev_data = "data", ev_det = "detector.ckpt", ev_out = "reports";
  std::string ev_split = "test";
  std::vector<std::string> ev_cors;
  ev->add_option("--data", ev_data, "data directory from gen-data");
  ev->add_option("--detector", ev_det, "detector checkpoint");
  ev->add_option("--corrector", ev_cors,
                 "corrector checkpoint (repeatable; 'identity' for the "
                 "pass-through row)");
  ev->add_option("--out", ev_out, "report directory");
  ev->add_option("--split", ev_split, "dev or test");

  // correct
  auto* co = app.add_subcommand("correct",
                                "correct a JSONL file of candidate lists");
  std::string co_vocab = "data/vocab.json", co_det = "detector.ckpt",
              co_cor = "corrector.ckpt", co_in, co_out;
  co->add_option("--vocab", co_vocab, "vocabulary file");
  co->add_option("--detector", co_det, "detector checkpoint");
  co->add_option("--corrector", co_cor, "corrector checkpoint");
  co->add_option("--in", co_in, "input JSONL (samples without truth)")
      ->required();
  co->add_option("--out", co_out, "output JSONL")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      PipelineConfig cfg = ResolveConfig(config_path, seed, "", "");
      auto paths = softcorrect::CmdGenData(cfg, gen_out, gen_force);
      std::cout << "[gen-data] wrote " << paths.train << ", " << paths.dev
                << ", " << paths.test << std::endl;
    } else if (td->parsed()) {
      PipelineConfig cfg = ResolveConfig(config_path, seed, td_variant, "");
      softcorrect::CmdTrainDetector(cfg, td_data, td_out, td_resume,
                                    &std::cout);
      std::cout << "[train-detector] wrote " << td_out << std::endl;
    } else if (tc->parsed()) {
      PipelineConfig cfg = ResolveConfig(config_path, seed, "", tc_variant);
      softcorrect::CmdTrainCorrector(cfg, tc_data, tc_det, tc_out, tc_resume,
                                     &std::cout);
      std::cout << "[train-corrector] wrote " << tc_out << std::endl;
    } else if (ev->parsed()) {
      PipelineConfig cfg = ResolveConfig(config_path, seed, "", "");
      if (ev_split != "dev" && ev_split != "test" && ev_split != "train")
        throw softcorrect::ConfigError("--split must be train, dev or test");
      softcorrect::CmdEvaluate(cfg, ev_data, ev_det, ev_cors, ev_out,
                               ev_split, &std::cout);
    } else if (co->parsed()) {
      PipelineConfig cfg = ResolveConfig(config_path, seed, "", "");
      softcorrect::CmdCorrect(cfg, co_vocab, co_det, co_cor, co_in, co_out);
      std::cout << "[correct] wrote " << co_out << std::endl;
    }
  } catch (const softcorrect::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  } catch (const softcorrect::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << std::endl;
    return 3;
  } catch (const softcorrect::DataError& e) {
    std::cerr << "data error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
