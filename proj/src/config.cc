// softcorrect/config.cc

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

#include "softcorrect/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace softcorrect {

using ordered_json = nlohmann::ordered_json;

namespace {

void RejectUnknownKeys(const ordered_json& j, const std::set<std::string>& ok,
                       const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key()))
      throw ConfigError(where + ": unknown config key '" + it.key() + "'");
  }
}

template <typename T>
void Get(const ordered_json& j, const char* key, T* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

}  // namespace

void PipelineConfig::Validate() const {
  if (data.content_tokens < 2)
    throw ConfigError("data.content_tokens must be >= 2");
  if (data.group_size < 1) throw ConfigError("data.group_size must be >= 1");
  if (data.len_min < 1) throw ConfigError("data.len_min must be >= 1");
  if (data.len_max < data.len_min)
    throw ConfigError("data.len_max must be >= data.len_min");
  if (data.train < 0 || data.dev < 0 || data.test < 0)
    throw ConfigError("split sizes must be non-negative");
  if (data.k < 1) throw ConfigError("data.k must be >= 1");
  data.noise.Validate();
  data.posterior.Validate();
  MakeModelConfig().Validate();
  if (train.epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (train.batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (train.lr <= 0) throw ConfigError("train.lr must be positive");
  if (train.pseudo_error_rate < 0 || train.pseudo_error_rate >= 1)
    throw ConfigError("train.pseudo_error_rate must lie in [0,1)");
  if (detect.alpha < 0 || detect.alpha > 1)
    throw ConfigError("detect.alpha must lie in [0,1]");
  if (detect.threshold < 0 || detect.threshold > 1)
    throw ConfigError("detect.threshold must lie in [0,1]");
  if (loss.variant != "anti_copy" && loss.variant != "ce" &&
      loss.variant != "binary")
    throw ConfigError("loss.variant must be anti_copy, ce or binary");
  if (loss.lambda < 0) throw ConfigError("loss.lambda must be >= 0");
  if (correct.variant != "constrained" && correct.variant != "unconstrained")
    throw ConfigError("correct.variant must be constrained or unconstrained");
  if (correct.repeat < 1) throw ConfigError("correct.repeat must be >= 1");
  if (train.workers < 1 || eval.workers < 1)
    throw ConfigError("worker counts must be >= 1");
}

std::string PipelineConfig::ToJson() const {
  ordered_json j;
  j["seed"] = seed;
  ordered_json d;
  d["content_tokens"] = data.content_tokens;
  d["group_size"] = data.group_size;
  d["len_min"] = data.len_min;
  d["len_max"] = data.len_max;
  d["train"] = data.train;
  d["dev"] = data.dev;
  d["test"] = data.test;
  d["k"] = data.k;
  ordered_json n;
  n["p_sub"] = data.noise.p_sub;
  n["p_del"] = data.noise.p_del;
  n["p_ins"] = data.noise.p_ins;
  n["mix"] = {data.noise.mix_keep, data.noise.mix_mask,
              data.noise.mix_homophone, data.noise.mix_random};
  n["homophone_frac"] = data.noise.homophone_frac;
  d["noise"] = std::move(n);
  ordered_json p;
  p["beta_correct"] = {data.posterior.beta_correct_a,
                       data.posterior.beta_correct_b};
  p["beta_error"] = {data.posterior.beta_error_a, data.posterior.beta_error_b};
  p["error_correlation"] = data.posterior.error_correlation;
  d["posterior"] = std::move(p);
  j["data"] = std::move(d);
  ordered_json m;
  m["layers"] = model.layers;
  m["dim"] = model.dim;
  m["heads"] = model.heads;
  m["ffn"] = model.ffn;
  m["max_len"] = model.max_len;
  j["model"] = std::move(m);
  ordered_json t;
  t["epochs"] = train.epochs;
  t["batch_size"] = train.batch_size;
  t["lr"] = train.lr;
  t["warmup_steps"] = train.warmup_steps;
  t["clip_norm"] = train.clip_norm;
  t["pseudo_error_rate"] = train.pseudo_error_rate;
  t["workers"] = train.workers;
  j["train"] = std::move(t);
  ordered_json de;
  de["alpha"] = detect.alpha;
  de["threshold"] = detect.threshold;
  de["sweep_threshold"] = detect.sweep_threshold;
  j["detect"] = std::move(de);
  ordered_json lo;
  lo["variant"] = loss.variant;
  lo["lambda"] = loss.lambda;
  j["loss"] = std::move(lo);
  ordered_json co;
  co["variant"] = correct.variant;
  co["repeat"] = correct.repeat;
  j["correct"] = std::move(co);
  ordered_json ev;
  ev["workers"] = eval.workers;
  j["eval"] = std::move(ev);
  return j.dump(2);
}

PipelineConfig PipelineConfig::FromJson(const std::string& text,
                                        const std::string& where) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + ": invalid config JSON: " + e.what());
  }
  PipelineConfig cfg;
  RejectUnknownKeys(j,
                    {"seed", "data", "model", "train", "detect", "loss",
                     "correct", "eval"},
                    where);
  Get(j, "seed", &cfg.seed);
  if (j.contains("data")) {
    const auto& d = j["data"];
    RejectUnknownKeys(d,
                      {"content_tokens", "group_size", "len_min", "len_max",
                       "train", "dev", "test", "k", "noise", "posterior"},
                      where + ".data");
    Get(d, "content_tokens", &cfg.data.content_tokens);
    Get(d, "group_size", &cfg.data.group_size);
    Get(d, "len_min", &cfg.data.len_min);
    Get(d, "len_max", &cfg.data.len_max);
    Get(d, "train", &cfg.data.train);
    Get(d, "dev", &cfg.data.dev);
    Get(d, "test", &cfg.data.test);
    Get(d, "k", &cfg.data.k);
    if (d.contains("noise")) {
      const auto& n = d["noise"];
      RejectUnknownKeys(
          n, {"p_sub", "p_del", "p_ins", "mix", "homophone_frac"},
          where + ".data.noise");
      Get(n, "p_sub", &cfg.data.noise.p_sub);
      Get(n, "p_del", &cfg.data.noise.p_del);
      Get(n, "p_ins", &cfg.data.noise.p_ins);
      Get(n, "homophone_frac", &cfg.data.noise.homophone_frac);
      if (n.contains("mix")) {
        auto mix = n["mix"].get<std::vector<double>>();
        if (mix.size() != 4)
          throw ConfigError(where + ": noise.mix needs 4 entries");
        cfg.data.noise.mix_keep = mix[0];
        cfg.data.noise.mix_mask = mix[1];
        cfg.data.noise.mix_homophone = mix[2];
        cfg.data.noise.mix_random = mix[3];
      }
    }
    if (d.contains("posterior")) {
      const auto& p = d["posterior"];
      RejectUnknownKeys(p,
                        {"beta_correct", "beta_error", "error_correlation"},
                        where + ".data.posterior");
      if (p.contains("beta_correct")) {
        auto b = p["beta_correct"].get<std::vector<double>>();
        if (b.size() != 2)
          throw ConfigError(where + ": beta_correct needs 2 entries");
        cfg.data.posterior.beta_correct_a = b[0];
        cfg.data.posterior.beta_correct_b = b[1];
      }
      if (p.contains("beta_error")) {
        auto b = p["beta_error"].get<std::vector<double>>();
        if (b.size() != 2)
          throw ConfigError(where + ": beta_error needs 2 entries");
        cfg.data.posterior.beta_error_a = b[0];
        cfg.data.posterior.beta_error_b = b[1];
      }
      Get(p, "error_correlation", &cfg.data.posterior.error_correlation);
    }
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    RejectUnknownKeys(m, {"layers", "dim", "heads", "ffn", "max_len"},
                      where + ".model");
    Get(m, "layers", &cfg.model.layers);
    Get(m, "dim", &cfg.model.dim);
    Get(m, "heads", &cfg.model.heads);
    Get(m, "ffn", &cfg.model.ffn);
    Get(m, "max_len", &cfg.model.max_len);
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    RejectUnknownKeys(t,
                      {"epochs", "batch_size", "lr", "warmup_steps",
                       "clip_norm", "pseudo_error_rate", "workers"},
                      where + ".train");
    Get(t, "epochs", &cfg.train.epochs);
    Get(t, "batch_size", &cfg.train.batch_size);
    Get(t, "lr", &cfg.train.lr);
    Get(t, "warmup_steps", &cfg.train.warmup_steps);
    Get(t, "clip_norm", &cfg.train.clip_norm);
    Get(t, "pseudo_error_rate", &cfg.train.pseudo_error_rate);
    Get(t, "workers", &cfg.train.workers);
  }
  if (j.contains("detect")) {
    const auto& de = j["detect"];
    RejectUnknownKeys(de, {"alpha", "threshold", "sweep_threshold"},
                      where + ".detect");
    Get(de, "alpha", &cfg.detect.alpha);
    Get(de, "threshold", &cfg.detect.threshold);
    Get(de, "sweep_threshold", &cfg.detect.sweep_threshold);
  }
  if (j.contains("loss")) {
    const auto& lo = j["loss"];
    RejectUnknownKeys(lo, {"variant", "lambda"}, where + ".loss");
    Get(lo, "variant", &cfg.loss.variant);
    Get(lo, "lambda", &cfg.loss.lambda);
  }
  if (j.contains("correct")) {
    const auto& co = j["correct"];
    RejectUnknownKeys(co, {"variant", "repeat"}, where + ".correct");
    Get(co, "variant", &cfg.correct.variant);
    Get(co, "repeat", &cfg.correct.repeat);
  }
  if (j.contains("eval")) {
    const auto& ev = j["eval"];
    RejectUnknownKeys(ev, {"workers"}, where + ".eval");
    Get(ev, "workers", &cfg.eval.workers);
  }
  cfg.Validate();
  return cfg;
}

PipelineConfig PipelineConfig::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return FromJson(buf.str(), path);
}

ModelConfig PipelineConfig::MakeModelConfig() const {
  ModelConfig m;
  m.layers = model.layers;
  m.dim = model.dim;
  m.heads = model.heads;
  m.ffn = model.ffn;
  m.k = data.k;
  m.max_len = model.max_len;
  m.vocab_content = data.content_tokens;
  return m;
}

OptimizerConfig PipelineConfig::MakeOptimizerConfig() const {
  OptimizerConfig o;
  o.lr = train.lr;
  o.warmup_steps = train.warmup_steps;
  o.clip_norm = train.clip_norm;
  return o;
}

uint64_t PipelineConfig::CompatHash(const std::string& kind) const {
  std::ostringstream os;
  os << kind << '|' << model.layers << '|' << model.dim << '|' << model.heads
     << '|' << model.ffn << '|' << model.max_len << '|' << data.k << '|'
     << data.content_tokens;
  return Fnv1a64(os.str());
}

}  // namespace softcorrect
