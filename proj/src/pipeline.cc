// softcorrect/pipeline.cc

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

#include "softcorrect/pipeline.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "softcorrect/cctc.h"
#include "softcorrect/losses.h"

namespace softcorrect {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::vector<TokenId>> PaddedRows(const AlignedGrid& grid, int k) {
  std::vector<std::vector<TokenId>> rows(grid.rows.begin(),
                                         grid.rows.begin() + grid.num_hyps());
  if (static_cast<int>(rows.size()) > k)
    throw ConfigError("grid has more candidate rows than data.k");
  while (static_cast<int>(rows.size()) < k) rows.push_back(rows[0]);
  return rows;
}

std::vector<TokenId> StripPhi(const std::vector<TokenId>& seq, TokenId phi) {
  std::vector<TokenId> out;
  out.reserve(seq.size());
  for (TokenId t : seq) {
    if (t != phi) out.push_back(t);
  }
  return out;
}

Mat Sigmoid(const Mat& scores) {
  return (1.0 / (1.0 + (-scores.array()).exp())).matrix();
}

}  // namespace

DetectorRunner::DetectorRunner(std::shared_ptr<const DetectorModel> model,
                               std::string variant)
    : model_(std::move(model)), variant_(std::move(variant)) {
  SC_CHECK(variant_ == "anti_copy" || variant_ == "ce" || variant_ == "binary",
           "unknown detector variant");
}

Selection DetectorRunner::Select(const AlignedGrid& hyps_grid) const {
  DetectorModel::TraceT trace;
  auto rows = PaddedRows(hyps_grid, model_->config().k);
  DetectorModel::Output out = model_->Forward(rows, &trace);
  if (variant_ == "binary")
    return SelectCandidateWithCellScores(hyps_grid, Sigmoid(out.bin_scores));
  if (variant_ == "ce") {
    // No GT class was trained; renormalize over V alone.
    Mat probs = SoftmaxRows(out.logits.leftCols(out.logits.cols() - 1));
    return SelectCandidate(hyps_grid, probs);
  }
  return SelectCandidate(hyps_grid, SoftmaxRows(out.logits));
}

AlignedGrid BuildInferenceGrid(const Sample& sample, const Vocabulary& vocab) {
  std::vector<std::vector<TokenId>> hyps;
  hyps.reserve(sample.hyps.size());
  for (const auto& h : sample.hyps) hyps.push_back(h.tokens);
  auto sim = [&vocab](TokenId a, TokenId b) { return vocab.Similarity(a, b); };
  return AlignMulti(hyps, sim, vocab.phi_id());
}

AlignedGrid BuildTrainingGrid(const Sample& sample, const Vocabulary& vocab) {
  SC_CHECK(!sample.truth.empty(), "training grid needs ground truth");
  auto sim = [&vocab](TokenId a, TokenId b) { return vocab.Similarity(a, b); };
  AlignedGrid grid = BuildInferenceGrid(sample, vocab);
  return MergeRow(grid, sample.truth, sim, /*as_truth=*/true);
}

// ---------------------------------------------------------------------------
// gen-data

GenDataPaths CmdGenData(const PipelineConfig& cfg, const std::string& out_dir,
                        bool force) {
  cfg.Validate();
  fs::create_directories(out_dir);
  GenDataPaths paths;
  paths.vocab = (fs::path(out_dir) / "vocab.json").string();
  paths.train = (fs::path(out_dir) / "train.jsonl").string();
  paths.dev = (fs::path(out_dir) / "dev.jsonl").string();
  paths.test = (fs::path(out_dir) / "test.jsonl").string();
  paths.manifest = (fs::path(out_dir) / "manifest.json").string();
  for (const std::string& p :
       {paths.vocab, paths.train, paths.dev, paths.test, paths.manifest}) {
    if (!force && fs::exists(p))
      throw DataError("refusing to overwrite " + p + " (use --force)");
  }

  Vocabulary vocab =
      Vocabulary::MakeSynthetic(cfg.data.content_tokens, cfg.data.group_size);
  vocab.Save(paths.vocab);

  const int total = cfg.data.train + cfg.data.dev + cfg.data.test;
  Rng base(cfg.seed);
  Rng truth_rng = base.Fork("truth");
  TruthConfig tc{1, cfg.data.len_min, cfg.data.len_max};
  std::vector<std::vector<TokenId>> truths;
  truths.reserve(total);
  std::set<std::vector<TokenId>> seen;
  while (static_cast<int>(truths.size()) < total) {
    auto seq = GenerateTruth(&truth_rng, tc, vocab)[0];
    if (seen.insert(seq).second) truths.push_back(std::move(seq));
  }

  Corpus all(total);
  int64_t hyp_tokens = 0, hyp_edits = 0, top_edits = 0, truth_tokens = 0;
  for (int i = 0; i < total; ++i) {
    Rng sample_rng = base.Fork("sample", static_cast<uint64_t>(i));
    all[i] = SimulateNBest(truths[i], &sample_rng, cfg.data.k, cfg.data.noise,
                           cfg.data.posterior, vocab);
    truth_tokens += static_cast<int64_t>(truths[i].size());
    for (size_t h = 0; h < all[i].hyps.size(); ++h) {
      hyp_tokens += static_cast<int64_t>(all[i].hyps[h].tokens.size());
      int64_t d = EditDistance(all[i].hyps[h].tokens, truths[i]);
      hyp_edits += d;
      if (h == 0) top_edits += d;
    }
  }

  Corpus train(all.begin(), all.begin() + cfg.data.train);
  Corpus dev(all.begin() + cfg.data.train,
             all.begin() + cfg.data.train + cfg.data.dev);
  Corpus test(all.begin() + cfg.data.train + cfg.data.dev, all.end());
  WriteCorpus(paths.train, train);
  WriteCorpus(paths.dev, dev);
  WriteCorpus(paths.test, test);

  ordered_json manifest;
  manifest["seed"] = cfg.seed;
  manifest["config"] = ordered_json::parse(cfg.ToJson());
  ordered_json splits;
  splits["train"] = cfg.data.train;
  splits["dev"] = cfg.data.dev;
  splits["test"] = cfg.data.test;
  manifest["splits"] = std::move(splits);
  ordered_json channel;
  channel["truth_tokens"] = truth_tokens;
  channel["hyp_tokens"] = hyp_tokens;
  channel["mean_hyp_cer"] =
      truth_tokens ? static_cast<double>(hyp_edits) /
                         (static_cast<double>(truth_tokens) * cfg.data.k)
                   : 0.0;
  channel["top_hyp_cer"] =
      truth_tokens ? static_cast<double>(top_edits) / truth_tokens : 0.0;
  manifest["channel"] = std::move(channel);
  std::ofstream mf(paths.manifest, std::ios::binary);
  if (!mf) throw DataError("cannot write manifest: " + paths.manifest);
  mf << manifest.dump(2) << '\n';
  return paths;
}

// ---------------------------------------------------------------------------
// checkpoint plumbing

TrainState LoadCompatible(const std::string& path, const std::string& kind,
                          const PipelineConfig& cfg) {
  TrainState state = LoadCheckpoint(path);
  if (state.kind != kind)
    throw DataError(path + ": expected a " + kind + " checkpoint, found " +
                    state.kind);
  PipelineConfig ckpt_cfg =
      PipelineConfig::FromJson(state.config_json, path + " (embedded config)");
  if (state.compat_hash != ckpt_cfg.CompatHash(kind))
    throw DataError(path + ": corrupt checkpoint (hash/config mismatch)");
  if (ckpt_cfg.CompatHash(kind) != cfg.CompatHash(kind))
    throw DataError(path +
                    ": checkpoint architecture/vocabulary does not match the "
                    "current config");
  return state;
}

std::shared_ptr<DetectorModel> DetectorFromState(const TrainState& state) {
  PipelineConfig ckpt_cfg = PipelineConfig::FromJson(
      state.config_json, "checkpoint embedded config");
  auto model = std::make_shared<DetectorModel>(ckpt_cfg.MakeModelConfig());
  if (model->params().flat().size() != state.params.size())
    throw DataError("checkpoint parameter count mismatch");
  model->params().flat() = state.params;
  return model;
}

std::shared_ptr<CorrectorModel> CorrectorFromState(const TrainState& state) {
  PipelineConfig ckpt_cfg = PipelineConfig::FromJson(
      state.config_json, "checkpoint embedded config");
  auto model = std::make_shared<CorrectorModel>(ckpt_cfg.MakeModelConfig());
  if (model->params().flat().size() != state.params.size())
    throw DataError("checkpoint parameter count mismatch");
  model->params().flat() = state.params;
  return model;
}

// ---------------------------------------------------------------------------
// detection threshold sweep

namespace {

struct DevItem {
  AlignedGrid grid;    // hypothesis rows only
  AlignedGrid merged;  // + truth row
  std::vector<int> col_map;
};

std::vector<DevItem> PrepareDevItems(const Corpus& corpus,
                                     const Vocabulary& vocab, int workers) {
  std::vector<DevItem> items(corpus.size());
  auto sim = [&vocab](TokenId a, TokenId b) { return vocab.Similarity(a, b); };
  ParallelFor(corpus.size(), workers, [&](size_t i) {
    items[i].grid = BuildInferenceGrid(corpus[i], vocab);
    items[i].merged = MergeRow(items[i].grid, corpus[i].truth, sim,
                               /*as_truth=*/true, &items[i].col_map);
  });
  return items;
}

// Extends a per-column vector from the pre-merge grid to the merged grid.
template <typename T>
std::vector<T> ExtendToMerged(const std::vector<T>& values,
                              const std::vector<int>& col_map, int merged_len,
                              T fill) {
  std::vector<T> out(merged_len, fill);
  for (size_t c = 0; c < values.size(); ++c) out[col_map[c]] = values[c];
  return out;
}

struct SweepPoint {
  double score;
  bool oracle_error;
};

struct SweepData {
  std::vector<SweepPoint> points;
  int64_t extra_fn = 0;  // truth-only columns the system never saw
};

SweepData CollectSweepData(const DetectorRunner& runner,
                           const std::vector<DevItem>& items,
                           const Corpus& corpus, double alpha, int workers) {
  std::vector<SweepData> per(items.size());
  ParallelFor(items.size(), workers, [&](size_t i) {
    const DevItem& item = items[i];
    Selection sel = runner.Select(item.grid);
    std::vector<double> asr = GatherAsrPosteriors(item.grid, sel, corpus[i]);
    std::vector<double> combined =
        CombineScores(sel.enc_prob, asr, sel.source, alpha);
    std::vector<TokenId> selected_ext =
        ExtendToMerged(sel.selected, item.col_map, item.merged.length(),
                       item.merged.phi);
    OracleLabels oracle = ComputeOracleLabels(item.merged, selected_ext);
    std::vector<bool> seen(item.merged.length(), false);
    for (size_t c = 0; c < sel.selected.size(); ++c) {
      per[i].points.push_back({combined[c], oracle.error[item.col_map[c]]});
      seen[item.col_map[c]] = true;
    }
    for (int c = 0; c < item.merged.length(); ++c) {
      if (!seen[c] && oracle.error[c]) ++per[i].extra_fn;
    }
  });
  SweepData all;
  for (const auto& d : per) {
    all.points.insert(all.points.end(), d.points.begin(), d.points.end());
    all.extra_fn += d.extra_fn;
  }
  return all;
}

struct SweepResult {
  double tau = 0.5;
  double f1 = 0.0;
};

SweepResult SweepThreshold(const SweepData& data) {
  SweepResult best;
  bool any = false;
  for (int i = 1; i <= 99; ++i) {
    const double tau = i / 100.0;
    PrfCounts counts;
    for (const auto& p : data.points)
      counts.Add(p.score < tau, p.oracle_error);
    counts.fn += data.extra_fn;
    PrfResult prf = DetectionPrf(counts);
    if (!any || prf.f1 > best.f1 + 1e-12) {
      best.tau = tau;
      best.f1 = prf.f1;
      any = true;
    }
  }
  return best;
}

void LogLine(std::ostream* log, const std::string& line) {
  if (log) *log << line << std::endl;
}

}  // namespace

// ---------------------------------------------------------------------------
// train-detector

void CmdTrainDetector(const PipelineConfig& cfg, const std::string& data_dir,
                      const std::string& out_path,
                      const std::string& resume_path, std::ostream* log) {
  cfg.Validate();
  const Vocabulary vocab =
      Vocabulary::Load((fs::path(data_dir) / "vocab.json").string());
  if (vocab.num_content() != cfg.data.content_tokens)
    throw DataError("vocabulary size differs from config data.content_tokens");
  const Corpus train_corpus =
      ReadCorpus((fs::path(data_dir) / "train.jsonl").string(), vocab);
  const Corpus dev_corpus =
      ReadCorpus((fs::path(data_dir) / "dev.jsonl").string(), vocab);
  if (train_corpus.empty()) throw DataError("training corpus is empty");

  const int workers = cfg.train.workers;
  std::vector<AlignedGrid> grids(train_corpus.size());
  ParallelFor(train_corpus.size(), workers, [&](size_t i) {
    grids[i] = BuildTrainingGrid(train_corpus[i], vocab);
  });
  std::vector<DevItem> dev_items = PrepareDevItems(dev_corpus, vocab, workers);

  DetectorModel model(cfg.MakeModelConfig());
  AdamOptimizer opt(cfg.MakeOptimizerConfig(),
                    static_cast<int>(model.params().flat().size()));
  Rng base(cfg.seed);
  int start_epoch = 0;
  uint64_t rejected = 0;
  if (!resume_path.empty()) {
    TrainState st = LoadCompatible(resume_path, "detector", cfg);
    if (st.params.size() != model.params().flat().size())
      throw DataError("resume checkpoint parameter count mismatch");
    model.params().flat() = st.params;
    opt.m_ = st.adam_m;
    opt.v_ = st.adam_v;
    opt.t_ = st.adam_t;
    start_epoch = st.epochs_done;
    rejected = st.rejected_steps;
  } else {
    Rng init_rng = base.Fork("detector-init");
    InitParams(&model.params(), &init_rng);
  }

  const int n = static_cast<int>(train_corpus.size());
  const int batch = cfg.train.batch_size;
  const std::string& variant = cfg.loss.variant;

  std::vector<ParamStore> wgrads;
  for (int w = 0; w < workers; ++w) wgrads.emplace_back(model.layout());

  double swept_tau = cfg.detect.threshold;
  double dev_f1 = 0.0;
  for (int epoch = start_epoch; epoch < cfg.train.epochs; ++epoch) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng = base.Fork("detector-shuffle", epoch);
    shuffle_rng.Shuffle(&order);

    double epoch_loss = 0.0;
    int64_t bad_samples = 0;
    for (int begin = 0; begin < n; begin += batch) {
      const int count = std::min(batch, n - begin);
      const double inv = 1.0 / count;
      std::vector<double> wloss(workers, 0.0);
      std::vector<int64_t> wbad(workers, 0);
      for (auto& g : wgrads) g.SetZero();
      ParallelForStatic(count, workers, [&](size_t bi, int w) {
        const AlignedGrid& grid = grids[order[begin + bi]];
        auto rows = PaddedRows(grid, cfg.data.k);
        const std::vector<TokenId>& targets = grid.truth_row();
        DetectorModel::TraceT trace;
        DetectorModel::Output out = model.Forward(rows, &trace);
        if (variant == "binary") {
          std::vector<std::vector<bool>> labels(grid.length());
          for (int t = 0; t < grid.length(); ++t) {
            labels[t].resize(cfg.data.k);
            for (int r = 0; r < cfg.data.k; ++r)
              labels[t][r] = rows[r][t] == targets[t];
          }
          LossResult lr = BinaryDetectLoss(out.bin_scores, labels);
          if (!std::isfinite(lr.loss)) {
            ++wbad[w];
            return;
          }
          model.Backward(trace, Mat(), lr.grad * inv, &wgrads[w]);
          wloss[w] += lr.loss;
        } else if (variant == "ce") {
          LossResult lr =
              CeLoss(out.logits.leftCols(vocab.size()), targets, vocab);
          if (!std::isfinite(lr.loss)) {
            ++wbad[w];
            return;
          }
          Mat grad = Mat::Zero(out.logits.rows(), out.logits.cols());
          grad.leftCols(vocab.size()) = lr.grad * inv;
          model.Backward(trace, grad, Mat(), &wgrads[w]);
          wloss[w] += lr.loss;
        } else {
          LossResult lr =
              AntiCopyLoss(out.logits, targets, vocab, cfg.loss.lambda);
          if (!std::isfinite(lr.loss)) {
            ++wbad[w];
            return;
          }
          model.Backward(trace, lr.grad * inv, Mat(), &wgrads[w]);
          wloss[w] += lr.loss;
        }
      });
      Vec total = wgrads[0].flat();
      for (int w = 1; w < workers; ++w) total += wgrads[w].flat();
      if (!opt.Step(&model.params().flat(), total)) ++rejected;
      for (int w = 0; w < workers; ++w) {
        epoch_loss += wloss[w];
        bad_samples += wbad[w];
      }
    }
    epoch_loss /= std::max(1, n);
    if (!std::isfinite(epoch_loss) ||
        bad_samples > std::max<int64_t>(50, n / 20))
      throw DivergenceError("detector training diverged (epoch loss " +
                            std::to_string(epoch_loss) + ", " +
                            std::to_string(bad_samples) + " bad samples)");

    DetectorRunner runner(
        std::shared_ptr<const DetectorModel>(&model, [](auto*) {}), variant);
    SweepData sweep_data =
        CollectSweepData(runner, dev_items, dev_corpus, cfg.detect.alpha,
                         workers);
    if (cfg.detect.sweep_threshold) {
      SweepResult sr = SweepThreshold(sweep_data);
      swept_tau = sr.tau;
      dev_f1 = sr.f1;
    } else {
      PrfCounts counts;
      for (const auto& p : sweep_data.points)
        counts.Add(p.score < cfg.detect.threshold, p.oracle_error);
      counts.fn += sweep_data.extra_fn;
      dev_f1 = DetectionPrf(counts).f1;
    }
    std::ostringstream line;
    line << "[train-detector] epoch " << epoch + 1 << "/" << cfg.train.epochs
         << " variant=" << variant << " loss=" << std::setprecision(6)
         << epoch_loss << " dev_f1=" << dev_f1 << " tau=" << swept_tau
         << " rejected=" << rejected;
    LogLine(log, line.str());

    PipelineConfig saved = cfg;
    saved.detect.threshold = swept_tau;
    TrainState state;
    state.kind = "detector";
    state.config_json = saved.ToJson();
    state.compat_hash = saved.CompatHash("detector");
    state.params = model.params().flat();
    state.adam_m = opt.m_;
    state.adam_v = opt.v_;
    state.adam_t = opt.t_;
    state.epochs_done = epoch + 1;
    state.rejected_steps = rejected;
    state.rng_state = base.SerializeState();
    SaveCheckpoint(state, out_path);
  }
}

// ---------------------------------------------------------------------------
// train-corrector

void CmdTrainCorrector(const PipelineConfig& cfg, const std::string& data_dir,
                       const std::string& detector_path,
                       const std::string& out_path,
                       const std::string& resume_path, std::ostream* log) {
  cfg.Validate();
  const Vocabulary vocab =
      Vocabulary::Load((fs::path(data_dir) / "vocab.json").string());
  if (vocab.num_content() != cfg.data.content_tokens)
    throw DataError("vocabulary size differs from config data.content_tokens");
  const Corpus train_corpus =
      ReadCorpus((fs::path(data_dir) / "train.jsonl").string(), vocab);
  const Corpus dev_corpus =
      ReadCorpus((fs::path(data_dir) / "dev.jsonl").string(), vocab);
  if (train_corpus.empty()) throw DataError("training corpus is empty");

  TrainState det_state = LoadCompatible(detector_path, "detector", cfg);
  PipelineConfig det_cfg = PipelineConfig::FromJson(
      det_state.config_json, detector_path + " (embedded config)");
  DetectorRunner runner(DetectorFromState(det_state), det_cfg.loss.variant);

  const int workers = cfg.train.workers;
  const bool constrained = cfg.correct.variant == "constrained";
  const int repeat = cfg.correct.repeat;
  const TokenId phi = vocab.phi_id();

  // The detector is frozen, so selection and oracle labels are fixed.
  struct Item {
    AlignedGrid grid;
    std::vector<TokenId> selected;
    OracleLabels labels;
  };
  std::vector<Item> items(train_corpus.size());
  ParallelFor(train_corpus.size(), workers, [&](size_t i) {
    items[i].grid = BuildTrainingGrid(train_corpus[i], vocab);
    Selection sel = runner.Select(HypsOnly(items[i].grid));
    items[i].selected = std::move(sel.selected);
    items[i].labels = ComputeOracleLabels(items[i].grid, items[i].selected);
  });
  std::vector<DevItem> dev_items = PrepareDevItems(dev_corpus, vocab, workers);

  CorrectorModel model(cfg.MakeModelConfig());
  AdamOptimizer opt(cfg.MakeOptimizerConfig(),
                    static_cast<int>(model.params().flat().size()));
  Rng base(cfg.seed);
  int start_epoch = 0;
  uint64_t rejected = 0, capacity_skipped = 0;
  if (!resume_path.empty()) {
    TrainState st = LoadCompatible(resume_path, "corrector", cfg);
    model.params().flat() = st.params;
    opt.m_ = st.adam_m;
    opt.v_ = st.adam_v;
    opt.t_ = st.adam_t;
    start_epoch = st.epochs_done;
    rejected = st.rejected_steps;
    capacity_skipped = st.capacity_skipped;
  } else {
    Rng init_rng = base.Fork("corrector-init");
    InitParams(&model.params(), &init_rng);
  }

  const int n = static_cast<int>(train_corpus.size());
  const int batch = cfg.train.batch_size;
  std::vector<ParamStore> wgrads;
  for (int w = 0; w < workers; ++w) wgrads.emplace_back(model.layout());

  for (int epoch = start_epoch; epoch < cfg.train.epochs; ++epoch) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng = base.Fork("corrector-shuffle", epoch);
    shuffle_rng.Shuffle(&order);

    double epoch_loss = 0.0;
    int64_t loss_samples = 0, bad_samples = 0, skipped = 0;
    for (int begin = 0; begin < n; begin += batch) {
      const int count = std::min(batch, n - begin);
      const double inv = 1.0 / count;
      std::vector<double> wloss(workers, 0.0);
      std::vector<int64_t> wbad(workers, 0), wskip(workers, 0),
          wcnt(workers, 0);
      for (auto& g : wgrads) g.SetZero();
      ParallelForStatic(count, workers, [&](size_t bi, int w) {
        const int idx = order[begin + bi];
        const Item& item = items[idx];
        Rng prng = base.Fork("pseudo",
                             static_cast<uint64_t>(epoch) * n + idx);
        ExpandedInput expanded;
        if (constrained) {
          std::vector<bool> flags = InjectPseudoErrors(
              item.labels.error, cfg.train.pseudo_error_rate, &prng);
          try {
            if (flags == item.labels.error) {
              expanded = ExpandInput(item.selected, item.labels, phi, repeat);
            } else {
              OracleLabels relabeled =
                  SpansFromFlags(item.grid, item.selected, flags);
              expanded = ExpandInput(item.selected, relabeled, phi, repeat);
            }
          } catch (const CapacityError&) {
            ++wskip[w];
            return;
          }
        } else {
          expanded = MakeUnconstrainedInput(item.selected, item.labels.target,
                                            true, repeat);
        }
        if (expanded.num_frames() == 0) {
          ++wskip[w];
          return;
        }
        CorrectorModel::TraceT trace;
        FrameLogProbs logp = model.Forward(expanded, &trace);
        LossResult lr = constrained
                            ? ConstrainedCtcLoss(logp, expanded)
                            : StandardCtcLoss(logp, expanded.target);
        if (!std::isfinite(lr.loss)) {
          ++wbad[w];
          return;
        }
        const double weight =
            inv / std::max<size_t>(1, expanded.target.size());
        model.Backward(trace, lr.grad * weight, &wgrads[w]);
        wloss[w] += lr.loss / std::max<size_t>(1, expanded.target.size());
        ++wcnt[w];
      });
      Vec total = wgrads[0].flat();
      for (int w = 1; w < workers; ++w) total += wgrads[w].flat();
      if (!opt.Step(&model.params().flat(), total)) ++rejected;
      for (int w = 0; w < workers; ++w) {
        epoch_loss += wloss[w];
        bad_samples += wbad[w];
        skipped += wskip[w];
        loss_samples += wcnt[w];
      }
    }
    capacity_skipped += skipped;
    epoch_loss /= std::max<int64_t>(1, loss_samples);
    if (!std::isfinite(epoch_loss) ||
        bad_samples > std::max<int64_t>(50, n / 20))
      throw DivergenceError("corrector training diverged (epoch loss " +
                            std::to_string(epoch_loss) + ", " +
                            std::to_string(bad_samples) + " bad samples)");

    // Dev CER with the current corrector and the frozen detector.
    int64_t dev_edits = 0, dev_ref = 0;
    {
      std::vector<int64_t> edits(dev_items.size()), refs(dev_items.size());
      ParallelFor(dev_items.size(), workers, [&](size_t i) {
        SentenceResult res = CorrectSentence(
            runner, &model, cfg.correct.variant, dev_corpus[i],
            dev_items[i].grid, vocab, det_cfg.detect.alpha,
            det_cfg.detect.threshold, repeat);
        edits[i] = EditDistance(res.output, dev_corpus[i].truth);
        refs[i] = static_cast<int64_t>(dev_corpus[i].truth.size());
      });
      for (size_t i = 0; i < edits.size(); ++i) {
        dev_edits += edits[i];
        dev_ref += refs[i];
      }
    }
    const double dev_cer =
        dev_ref ? static_cast<double>(dev_edits) / dev_ref : 0.0;
    std::ostringstream line;
    line << "[train-corrector] epoch " << epoch + 1 << "/" << cfg.train.epochs
         << " variant=" << cfg.correct.variant << " loss="
         << std::setprecision(6) << epoch_loss << " dev_cer=" << dev_cer
         << " capacity_skipped=" << capacity_skipped
         << " rejected=" << rejected;
    LogLine(log, line.str());

    TrainState state;
    state.kind = "corrector";
    state.config_json = cfg.ToJson();
    state.compat_hash = cfg.CompatHash("corrector");
    state.params = model.params().flat();
    state.adam_m = opt.m_;
    state.adam_v = opt.v_;
    state.adam_t = opt.t_;
    state.epochs_done = epoch + 1;
    state.rejected_steps = rejected;
    state.capacity_skipped = capacity_skipped;
    state.rng_state = base.SerializeState();
    SaveCheckpoint(state, out_path);
  }
}

// ---------------------------------------------------------------------------
// inference

SentenceResult CorrectSentence(const DetectorRunner& detector,
                               const CorrectorModel* corrector,
                               const std::string& corrector_variant,
                               const Sample& sample, const AlignedGrid& grid,
                               const Vocabulary& vocab, double alpha,
                               double tau, int repeat) {
  SentenceResult res;
  Selection sel = detector.Select(grid);
  DetectionOutcome det = Detect(grid, sel, sample, alpha, tau);
  res.selection = std::move(det.selection);
  res.combined = std::move(det.combined);
  res.flags = std::move(det.flags);
  const TokenId phi = vocab.phi_id();

  if (corrector_variant == "identity" || corrector == nullptr) {
    res.output = sample.hyps.empty() ? std::vector<TokenId>{}
                                     : sample.hyps[0].tokens;
    res.skipped = true;
    return res;
  }
  if (corrector_variant == "unconstrained") {
    ExpandedInput expanded = MakeUnconstrainedInput(res.selection.selected, {},
                                                    false, repeat);
    CorrectorModel::TraceT trace;
    FrameLogProbs logp = corrector->Forward(expanded, &trace);
    DecodeResult dec = ConstrainedGreedyDecode(logp, expanded);
    res.output = std::move(dec.output);
    return res;
  }
  // constrained
  if (ShouldSkipDecoder(res.flags)) {
    res.output = StripPhi(res.selection.selected, phi);
    res.skipped = true;
    return res;
  }
  ExpandedInput expanded =
      ExpandInput(res.selection.selected, res.flags, phi, repeat);
  CorrectorModel::TraceT trace;
  FrameLogProbs logp = corrector->Forward(expanded, &trace);
  DecodeResult dec = ConstrainedGreedyDecode(logp, expanded);
  res.output = std::move(dec.output);
  res.segment_outputs = std::move(dec.segment_outputs);
  return res;
}

// ---------------------------------------------------------------------------
// evaluate

namespace {

struct RowAccum {
  EvalReport report;
  PrfCounts prf;
  CorrectionCounts correction;
};

// Detection and correction bookkeeping for one sentence against the
// merged (truth-bearing) grid.
void AccumulateSentence(const DevItem& item, const Sample& sample,
                        const SentenceResult& res, bool measure_segments,
                        RowAccum* acc) {
  acc->report.sentences += 1;
  acc->report.skipped_sentences += res.skipped ? 1 : 0;
  acc->report.edit_errors += EditDistance(res.output, sample.truth);
  acc->report.ref_tokens += static_cast<int64_t>(sample.truth.size());

  const int merged_len = item.merged.length();
  std::vector<TokenId> selected_ext = ExtendToMerged(
      res.selection.selected, item.col_map, merged_len, item.merged.phi);
  OracleLabels oracle = ComputeOracleLabels(item.merged, selected_ext);
  std::vector<bool> flags_ext =
      ExtendToMerged(res.flags, item.col_map, merged_len, false);
  std::vector<bool> seen(merged_len, false);
  for (int c : item.col_map) seen[c] = true;
  for (int c = 0; c < merged_len; ++c) {
    // Truth-only columns count as undetected oracle errors.
    acc->prf.Add(seen[c] && flags_ext[c], oracle.error[c]);
  }

  if (!measure_segments) return;
  const int old_len = static_cast<int>(res.flags.size());
  int seg_index = 0;
  for (int b = 0; b < old_len;) {
    if (!res.flags[b]) {
      ++b;
      continue;
    }
    int e = b;
    while (e < old_len && res.flags[e]) ++e;
    // Oracle target span: truth content strictly between the surrounding
    // unflagged columns, truth-only columns included.
    const int lo = b == 0 ? 0 : item.col_map[b - 1] + 1;
    const int hi = e == old_len ? merged_len : item.col_map[e];
    bool attempted = false;
    std::vector<TokenId> span;
    for (int c = lo; c < hi; ++c) {
      if (oracle.error[c]) attempted = true;
      const TokenId tr = item.merged.truth_row()[c];
      if (tr != item.merged.phi) span.push_back(tr);
    }
    if (attempted && seg_index < static_cast<int>(res.segment_outputs.size()))
      acc->correction.Add(res.segment_outputs[seg_index], span);
    ++seg_index;
    b = e;
  }
}

std::string FormatReportText(const std::vector<EvalReport>& rows,
                             const std::string& split, double alpha,
                             double tau) {
  std::ostringstream os;
  os << "Evaluation on " << split << " (alpha=" << alpha << ", tau=" << tau
     << ")\n";
  os << std::left << std::setw(18) << "Model" << std::right << std::setw(8)
     << "CER" << std::setw(9) << "CERR" << std::setw(8) << "P_det"
     << std::setw(8) << "R_det" << std::setw(8) << "F1_det" << std::setw(8)
     << "P_cor" << std::setw(7) << "Skip" << '\n';
  for (const auto& r : rows) {
    os << std::left << std::setw(18) << r.variant << std::right
       << std::setw(8) << std::fixed << std::setprecision(2) << r.cer * 100.0;
    if (r.variant == "no_correction")
      os << std::setw(9) << "-";
    else
      os << std::setw(9) << std::setprecision(2) << r.cerr;
    os << std::setw(8) << std::setprecision(2) << r.detection.precision * 100
       << std::setw(8) << r.detection.recall * 100 << std::setw(8)
       << r.detection.f1 * 100 << std::setw(8) << r.p_cor * 100
       << std::setw(7) << std::setprecision(2) << r.skip_rate() << '\n';
  }
  return os.str();
}

ordered_json ReportRowJson(const EvalReport& r) {
  ordered_json j;
  j["variant"] = r.variant;
  j["cer"] = r.cer;
  j["cer_baseline"] = r.cer_baseline;
  j["cerr"] = r.cerr;
  j["p_det"] = r.detection.precision;
  j["p_det_defined"] = r.detection.precision_defined;
  j["r_det"] = r.detection.recall;
  j["r_det_defined"] = r.detection.recall_defined;
  j["f1_det"] = r.detection.f1;
  j["f1_det_defined"] = r.detection.f1_defined;
  j["p_cor"] = r.p_cor;
  j["p_cor_defined"] = r.p_cor_defined;
  j["detection_counts"] = {{"tp", r.detection.counts.tp},
                           {"fp", r.detection.counts.fp},
                           {"fn", r.detection.counts.fn}};
  j["correction_counts"] = {{"attempted", r.correction.attempted},
                            {"matched", r.correction.matched}};
  j["sentences"] = r.sentences;
  j["skipped_sentences"] = r.skipped_sentences;
  j["skip_rate"] = r.skip_rate();
  j["edit_errors"] = r.edit_errors;
  j["baseline_errors"] = r.baseline_errors;
  j["ref_tokens"] = r.ref_tokens;
  return j;
}

}  // namespace

EvalOutput CmdEvaluate(const PipelineConfig& cfg, const std::string& data_dir,
                       const std::string& detector_path,
                       const std::vector<std::string>& corrector_paths,
                       const std::string& out_dir, const std::string& split,
                       std::ostream* log) {
  cfg.Validate();
  const Vocabulary vocab =
      Vocabulary::Load((fs::path(data_dir) / "vocab.json").string());
  if (vocab.num_content() != cfg.data.content_tokens)
    throw DataError("vocabulary size differs from config data.content_tokens");
  const Corpus corpus =
      ReadCorpus((fs::path(data_dir) / (split + ".jsonl")).string(), vocab);

  TrainState det_state = LoadCompatible(detector_path, "detector", cfg);
  PipelineConfig det_cfg = PipelineConfig::FromJson(
      det_state.config_json, detector_path + " (embedded config)");
  DetectorRunner runner(DetectorFromState(det_state), det_cfg.loss.variant);
  const double alpha = det_cfg.detect.alpha;
  const double tau = det_cfg.detect.threshold;

  const int workers = cfg.eval.workers;
  std::vector<DevItem> items = PrepareDevItems(corpus, vocab, workers);

  int64_t baseline_errors = 0, ref_tokens = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    baseline_errors +=
        EditDistance(corpus[i].hyps[0].tokens, corpus[i].truth);
    ref_tokens += static_cast<int64_t>(corpus[i].truth.size());
  }
  const double cer_baseline =
      ref_tokens ? static_cast<double>(baseline_errors) / ref_tokens : 0.0;

  EvalOutput out;
  out.detector_alpha = alpha;
  out.detector_tau = tau;

  EvalReport base_row;
  base_row.variant = "no_correction";
  base_row.cer = cer_baseline;
  base_row.cer_baseline = cer_baseline;
  base_row.cerr = 0.0;
  base_row.sentences = static_cast<int64_t>(corpus.size());
  base_row.edit_errors = baseline_errors;
  base_row.baseline_errors = baseline_errors;
  base_row.ref_tokens = ref_tokens;
  out.rows.push_back(base_row);

  for (const std::string& cpath : corrector_paths) {
    std::string variant = "identity";
    std::shared_ptr<CorrectorModel> corrector;
    int repeat = cfg.correct.repeat;
    if (cpath != "identity") {
      TrainState cor_state = LoadCompatible(cpath, "corrector", cfg);
      PipelineConfig cor_cfg = PipelineConfig::FromJson(
          cor_state.config_json, cpath + " (embedded config)");
      corrector = CorrectorFromState(cor_state);
      variant = cor_cfg.correct.variant;
      repeat = cor_cfg.correct.repeat;
    }
    std::vector<SentenceResult> results(corpus.size());
    ParallelFor(corpus.size(), workers, [&](size_t i) {
      results[i] =
          CorrectSentence(runner, corrector.get(), variant, corpus[i],
                          items[i].grid, vocab, alpha, tau, repeat);
    });
    RowAccum acc;
    acc.report.variant = variant;
    const bool measure_segments = variant == "constrained";
    for (size_t i = 0; i < corpus.size(); ++i)
      AccumulateSentence(items[i], corpus[i], results[i], measure_segments,
                         &acc);
    acc.report.detection = DetectionPrf(acc.prf);
    acc.report.correction = acc.correction;
    acc.report.p_cor =
        CorrectionPrecision(acc.correction, &acc.report.p_cor_defined);
    acc.report.baseline_errors = baseline_errors;
    acc.report.cer_baseline = cer_baseline;
    acc.report.cer = acc.report.ref_tokens
                         ? static_cast<double>(acc.report.edit_errors) /
                               acc.report.ref_tokens
                         : 0.0;
    acc.report.cerr =
        cer_baseline > 0 ? Cerr(acc.report.cer, cer_baseline) : 0.0;
    out.rows.push_back(acc.report);
  }

  ordered_json j;
  j["split"] = split;
  j["config"] = ordered_json::parse(cfg.ToJson());
  ordered_json jd;
  jd["path"] = detector_path;
  jd["variant"] = det_cfg.loss.variant;
  jd["alpha"] = alpha;
  jd["threshold"] = tau;
  j["detector"] = std::move(jd);
  ordered_json jrows = ordered_json::array();
  for (const auto& r : out.rows) jrows.push_back(ReportRowJson(r));
  j["rows"] = std::move(jrows);
  out.json = j.dump(2);
  out.text = FormatReportText(out.rows, split, alpha, tau);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream jf((fs::path(out_dir) / ("report_" + split + ".json")),
                     std::ios::binary);
    if (!jf) throw DataError("cannot write report in " + out_dir);
    jf << out.json << '\n';
    std::ofstream tf((fs::path(out_dir) / ("report_" + split + ".txt")),
                     std::ios::binary);
    tf << out.text;
  }
  if (log) *log << out.text;
  return out;
}

// ---------------------------------------------------------------------------
// correct

void CmdCorrect(const PipelineConfig& cfg, const std::string& vocab_path,
                const std::string& detector_path,
                const std::string& corrector_path,
                const std::string& input_path,
                const std::string& output_path) {
  cfg.Validate();
  const Vocabulary vocab = Vocabulary::Load(vocab_path);
  if (vocab.num_content() != cfg.data.content_tokens)
    throw DataError("vocabulary size differs from config data.content_tokens");
  TrainState det_state = LoadCompatible(detector_path, "detector", cfg);
  PipelineConfig det_cfg = PipelineConfig::FromJson(
      det_state.config_json, detector_path + " (embedded config)");
  DetectorRunner runner(DetectorFromState(det_state), det_cfg.loss.variant);

  TrainState cor_state = LoadCompatible(corrector_path, "corrector", cfg);
  PipelineConfig cor_cfg = PipelineConfig::FromJson(
      cor_state.config_json, corrector_path + " (embedded config)");
  std::shared_ptr<CorrectorModel> corrector = CorrectorFromState(cor_state);

  const Corpus inputs =
      ReadCorpus(input_path, vocab, /*require_truth=*/false);
  std::vector<SentenceResult> results(inputs.size());
  std::vector<AlignedGrid> grids(inputs.size());
  ParallelFor(inputs.size(), cfg.eval.workers, [&](size_t i) {
    grids[i] = BuildInferenceGrid(inputs[i], vocab);
    results[i] = CorrectSentence(runner, corrector.get(),
                                 cor_cfg.correct.variant, inputs[i], grids[i],
                                 vocab, det_cfg.detect.alpha,
                                 det_cfg.detect.threshold,
                                 cor_cfg.correct.repeat);
  });

  std::ofstream outf(output_path, std::ios::binary);
  if (!outf) throw DataError("cannot write output: " + output_path);
  for (const auto& res : results) {
    ordered_json j;
    j["selected"] = res.selection.selected;
    std::vector<int> flags(res.flags.size());
    for (size_t t = 0; t < res.flags.size(); ++t) flags[t] = res.flags[t];
    j["flags"] = flags;
    j["output"] = res.output;
    j["skipped"] = res.skipped;
    outf << j.dump() << '\n';
  }
}

}  // namespace softcorrect
