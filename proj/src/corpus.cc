// softcorrect/corpus.cc

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

#include "softcorrect/corpus.h"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "json.hpp"

namespace softcorrect {

using ordered_json = nlohmann::ordered_json;

void NoiseConfig::Validate() const {
  auto prob = [](double p, const char* name) {
    if (p < 0.0 || p > 1.0)
      throw ConfigError(std::string(name) + " must lie in [0,1]");
  };
  prob(p_sub, "p_sub");
  prob(p_del, "p_del");
  prob(p_ins, "p_ins");
  if (p_sub + p_del + p_ins > 1.0 + 1e-12)
    throw ConfigError("p_sub + p_del + p_ins must not exceed 1");
  if (mix_keep < 0 || mix_mask < 0 || mix_homophone < 0 || mix_random < 0)
    throw ConfigError("mix weights must be non-negative");
  if (mix_keep + mix_mask + mix_homophone + mix_random <= 0)
    throw ConfigError("mix weights must not all be zero");
  if (homophone_frac > 1.0)
    throw ConfigError("homophone_frac must lie in [0,1]");
}

void PosteriorModel::Validate() const {
  if (error_correlation < 0.0 || error_correlation > 1.0)
    throw ConfigError("error_correlation must lie in [0,1]");
  if (beta_correct_a <= 0 || beta_correct_b <= 0 || beta_error_a <= 0 ||
      beta_error_b <= 0)
    throw ConfigError("Beta parameters must be positive");
}

namespace {

enum class OpKind { kKeep, kSubHomophone, kSubRandom, kDel, kIns };

struct MixProbs {
  double keep, homophone, random;  // random folds mask + random together
};

MixProbs ResolveMix(const NoiseConfig& n) {
  double k = n.mix_keep, m = n.mix_mask, h = n.mix_homophone, r = n.mix_random;
  double total = k + m + h + r;
  k /= total;
  m /= total;
  h /= total;
  r /= total;
  if (n.homophone_frac >= 0.0) {
    double rest = k + m + r;
    double scale = rest > 0 ? (1.0 - n.homophone_frac) / rest : 0.0;
    k *= scale;
    m *= scale;
    r *= scale;
    h = n.homophone_frac;
  }
  return {k, h, m + r};
}

OpKind SampleOpKind(Rng* rng, const NoiseConfig& noise, const MixProbs& mix) {
  double u = rng->Uniform();
  if (u < noise.p_del) return OpKind::kDel;
  u -= noise.p_del;
  if (u < noise.p_ins) return OpKind::kIns;
  u -= noise.p_ins;
  if (u < noise.p_sub) {
    double v = rng->Uniform();
    if (v < mix.keep) return OpKind::kKeep;
    v -= mix.keep;
    if (v < mix.homophone) return OpKind::kSubHomophone;
    return OpKind::kSubRandom;
  }
  return OpKind::kKeep;
}

// Uniform content token different from `original`.
TokenId RandomOtherToken(Rng* rng, TokenId original, const Vocabulary& vocab) {
  int c = vocab.num_content();
  if (c <= 1) return original;
  TokenId t = static_cast<TokenId>(rng->UniformInt(c - 1));
  return t >= original ? t + 1 : t;
}

// Applies one planned operation at truth position `pos`, appending emitted
// tokens and annotations.
void RealizeOp(OpKind kind, const std::vector<TokenId>& truth, int pos,
               Rng* rng, const Vocabulary& vocab, CorruptResult* out) {
  TokenId original = truth[pos];
  switch (kind) {
    case OpKind::kDel:
      out->ops.push_back({EditKind::kDel, pos, original});
      return;
    case OpKind::kIns: {
      out->tokens.push_back(original);
      out->ops.push_back({EditKind::kKeep, pos, original});
      TokenId inserted = static_cast<TokenId>(
          rng->UniformInt(vocab.num_content()));
      out->tokens.push_back(inserted);
      out->ops.push_back({EditKind::kIns, pos, inserted});
      return;
    }
    case OpKind::kSubHomophone: {
      std::vector<TokenId> mates = vocab.GroupMates(original);
      if (mates.empty()) {
        out->tokens.push_back(original);
        out->ops.push_back({EditKind::kKeep, pos, original});
      } else {
        TokenId sub = mates[rng->UniformInt(mates.size())];
        out->tokens.push_back(sub);
        out->ops.push_back({EditKind::kSub, pos, sub});
      }
      return;
    }
    case OpKind::kSubRandom: {
      TokenId sub = RandomOtherToken(rng, original, vocab);
      out->tokens.push_back(sub);
      out->ops.push_back(
          {sub == original ? EditKind::kKeep : EditKind::kSub, pos, sub});
      return;
    }
    case OpKind::kKeep:
      out->tokens.push_back(original);
      out->ops.push_back({EditKind::kKeep, pos, original});
      return;
  }
}

}  // namespace

std::vector<std::vector<TokenId>> GenerateTruth(Rng* rng,
                                                const TruthConfig& config,
                                                const Vocabulary& vocab) {
  if (config.len_min < 1)
    throw ConfigError("len_min must be at least 1");
  if (config.len_max < config.len_min)
    throw ConfigError("len_max must be >= len_min");
  if (config.count < 0) throw ConfigError("count must be non-negative");
  std::vector<std::vector<TokenId>> out;
  out.reserve(config.count);
  for (int i = 0; i < config.count; ++i) {
    int len = config.len_min +
              static_cast<int>(rng->UniformInt(
                  config.len_max - config.len_min + 1));
    std::vector<TokenId> seq(len);
    for (int t = 0; t < len; ++t)
      seq[t] = static_cast<TokenId>(rng->UniformInt(vocab.num_content()));
    out.push_back(std::move(seq));
  }
  return out;
}

CorruptResult Corrupt(const std::vector<TokenId>& truth, Rng* rng,
                      const NoiseConfig& noise, const Vocabulary& vocab) {
  noise.Validate();
  MixProbs mix = ResolveMix(noise);
  CorruptResult out;
  out.tokens.reserve(truth.size() + 2);
  for (int pos = 0; pos < static_cast<int>(truth.size()); ++pos) {
    OpKind kind = SampleOpKind(rng, noise, mix);
    RealizeOp(kind, truth, pos, rng, vocab, &out);
  }
  return out;
}

Sample SimulateNBest(const std::vector<TokenId>& truth, Rng* rng, int k,
                     const NoiseConfig& noise, const PosteriorModel& model,
                     const Vocabulary& vocab) {
  if (k < 1) throw ConfigError("K must be at least 1");
  noise.Validate();
  model.Validate();
  MixProbs mix = ResolveMix(noise);
  const int len = static_cast<int>(truth.size());

  // Master plan shared across hypotheses with probability error_correlation.
  std::vector<OpKind> master(len);
  for (int pos = 0; pos < len; ++pos)
    master[pos] = SampleOpKind(rng, noise, mix);

  struct Draft {
    CorruptResult result;
    int noise_count = 0;
    int order = 0;
  };
  std::vector<Draft> drafts(k);
  for (int h = 0; h < k; ++h) {
    Draft& d = drafts[h];
    d.order = h;
    for (int pos = 0; pos < len; ++pos) {
      OpKind kind = rng->Uniform() < model.error_correlation
                        ? master[pos]
                        : SampleOpKind(rng, noise, mix);
      RealizeOp(kind, truth, pos, rng, vocab, &d.result);
    }
    for (const EditOp& op : d.result.ops) {
      bool is_error = (op.kind == EditKind::kDel) ||
                      (op.kind == EditKind::kIns) ||
                      (op.kind == EditKind::kSub);
      if (is_error) ++d.noise_count;
    }
  }
  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const Draft& a, const Draft& b) {
                     return a.noise_count < b.noise_count;
                   });

  Sample sample;
  sample.truth = truth;
  sample.hyps.reserve(k);
  for (Draft& d : drafts) {
    Hypothesis hyp;
    hyp.tokens = std::move(d.result.tokens);
    hyp.posteriors.reserve(hyp.tokens.size());
    size_t ti = 0;
    for (const EditOp& op : d.result.ops) {
      if (op.kind == EditKind::kDel) continue;
      bool correct = op.kind == EditKind::kKeep;
      double p = correct
                     ? rng->Beta(model.beta_correct_a, model.beta_correct_b)
                     : rng->Beta(model.beta_error_a, model.beta_error_b);
      hyp.posteriors.push_back(std::max(p, 1e-6));
      ++ti;
    }
    SC_CHECK(ti == hyp.tokens.size(), "posterior/token count mismatch");
    sample.hyps.push_back(std::move(hyp));
  }
  return sample;
}

std::string SerializeSample(const Sample& sample) {
  ordered_json j;
  if (!sample.truth.empty()) j["truth"] = sample.truth;
  ordered_json hyps = ordered_json::array();
  for (const Hypothesis& h : sample.hyps) {
    ordered_json jh;
    jh["tokens"] = h.tokens;
    jh["post"] = h.posteriors;
    hyps.push_back(std::move(jh));
  }
  j["hyps"] = std::move(hyps);
  return j.dump();
}

namespace {

void ValidateSequence(const std::vector<TokenId>& seq, const Vocabulary& vocab,
                      const std::string& where) {
  for (TokenId t : seq) {
    if (!vocab.IsContent(t))
      throw DataError(where + ": token id " + std::to_string(t) +
                      " outside the content vocabulary");
  }
}

}  // namespace

Sample ParseSampleLine(const std::string& line, const Vocabulary& vocab,
                       bool require_truth, const std::string& where) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + ": invalid JSON: " + e.what());
  }
  Sample sample;
  if (j.contains("truth")) {
    try {
      sample.truth = j["truth"].get<std::vector<TokenId>>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": bad 'truth' field: " + e.what());
    }
    ValidateSequence(sample.truth, vocab, where + " (truth)");
  } else if (require_truth) {
    throw DataError(where + ": missing 'truth' field");
  }
  if (!j.contains("hyps") || !j["hyps"].is_array() || j["hyps"].empty())
    throw DataError(where + ": needs a non-empty 'hyps' array");
  for (const auto& jh : j["hyps"]) {
    Hypothesis hyp;
    try {
      hyp.tokens = jh.at("tokens").get<std::vector<TokenId>>();
      hyp.posteriors = jh.at("post").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": bad hypothesis record: " + e.what());
    }
    if (hyp.tokens.size() != hyp.posteriors.size())
      throw DataError(where + ": 'post' length differs from 'tokens' length");
    for (double p : hyp.posteriors) {
      if (!(p > 0.0) || p > 1.0)
        throw DataError(where + ": posterior outside (0,1]");
    }
    ValidateSequence(hyp.tokens, vocab, where + " (hyp)");
    sample.hyps.push_back(std::move(hyp));
  }
  return sample;
}

Corpus ReadCorpus(const std::string& path, const Vocabulary& vocab,
                  bool require_truth) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  Corpus corpus;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    corpus.push_back(ParseSampleLine(
        line, vocab, require_truth, path + ":" + std::to_string(line_no)));
  }
  return corpus;
}

void WriteCorpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (const Sample& s : corpus) out << SerializeSample(s) << '\n';
}

}  // namespace softcorrect
