// softcorrect/losses.cc

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

#include "softcorrect/losses.h"

namespace softcorrect {

namespace {

int CountValid(const std::vector<bool>& valid, int n) {
  if (valid.empty()) return n;
  int count = 0;
  for (bool v : valid) count += v ? 1 : 0;
  return count;
}

bool IsValid(const std::vector<bool>& valid, int t) {
  return valid.empty() || valid[t];
}

}  // namespace

LossResult AntiCopyLoss(const EncoderLogits& logits,
                        const std::vector<TokenId>& targets,
                        const Vocabulary& vocab, double lambda,
                        Reduction reduction, const std::vector<bool>& valid) {
  const int n = static_cast<int>(logits.rows());
  const int classes = vocab.detector_classes();
  const int gt = vocab.gt_class();
  SC_CHECK(logits.cols() == classes, "logits must have |V|+1 columns");
  SC_CHECK(static_cast<int>(targets.size()) == n,
           "targets length differs from logits rows");
  SC_CHECK(lambda >= 0.0, "lambda must be non-negative");
  if (!valid.empty())
    SC_CHECK(static_cast<int>(valid.size()) == n, "valid mask length mismatch");

  LossResult result;
  result.grad = Mat::Zero(n, classes);
  const int denom = CountValid(valid, n);
  const double scale =
      reduction == Reduction::kMean ? 1.0 / std::max(denom, 1) : 1.0;

  double total = 0.0;
  for (int t = 0; t < n; ++t) {
    if (!IsValid(valid, t)) continue;
    const TokenId y = targets[t];
    if (!vocab.InVocab(y))
      throw std::logic_error("anti-copy target must be a vocabulary token");

    // term1: cross-entropy over the full set V + GT.
    Eigen::RowVectorXd row = logits.row(t);
    double mx = row.maxCoeff();
    double lse = mx + std::log((row.array() - mx).exp().sum());
    total += (lse - row(y)) * scale;
    Eigen::RowVectorXd soft = (row.array() - lse).exp();
    result.grad.row(t) += scale * soft;
    result.grad(t, y) -= scale;

    // term2: predict GT over (V \ y) + GT.
    Eigen::RowVectorXd masked = row;
    masked(y) = -std::numeric_limits<double>::infinity();
    double mx2 = masked.maxCoeff();
    double lse2 = 0.0;
    for (int c = 0; c < classes; ++c) {
      if (c == y) continue;
      lse2 += std::exp(masked(c) - mx2);
    }
    lse2 = mx2 + std::log(lse2);
    total += lambda * (lse2 - row(gt)) * scale;
    for (int c = 0; c < classes; ++c) {
      if (c == y) continue;
      result.grad(t, c) += lambda * scale * std::exp(row(c) - lse2);
    }
    result.grad(t, gt) -= lambda * scale;
  }
  result.loss = total;
  return result;
}

LossResult CeLoss(const Mat& logits, const std::vector<TokenId>& targets,
                  const Vocabulary& vocab, Reduction reduction,
                  const std::vector<bool>& valid) {
  const int n = static_cast<int>(logits.rows());
  SC_CHECK(logits.cols() == vocab.size(), "logits must have |V| columns");
  SC_CHECK(static_cast<int>(targets.size()) == n,
           "targets length differs from logits rows");
  LossResult result;
  result.grad = Mat::Zero(n, logits.cols());
  const int denom = CountValid(valid, n);
  const double scale =
      reduction == Reduction::kMean ? 1.0 / std::max(denom, 1) : 1.0;
  double total = 0.0;
  for (int t = 0; t < n; ++t) {
    if (!IsValid(valid, t)) continue;
    const TokenId y = targets[t];
    SC_CHECK(vocab.InVocab(y), "ce target outside V");
    Eigen::RowVectorXd row = logits.row(t);
    double mx = row.maxCoeff();
    double lse = mx + std::log((row.array() - mx).exp().sum());
    total += (lse - row(y)) * scale;
    result.grad.row(t) += scale * (row.array() - lse).exp().matrix();
    result.grad(t, y) -= scale;
  }
  result.loss = total;
  return result;
}

LossResult BinaryDetectLoss(const Mat& scores,
                            const std::vector<std::vector<bool>>& labels,
                            Reduction reduction) {
  const int n = static_cast<int>(scores.rows());
  const int k = static_cast<int>(scores.cols());
  SC_CHECK(static_cast<int>(labels.size()) == n, "labels rows mismatch");
  LossResult result;
  result.grad = Mat::Zero(n, k);
  const int cells = n * k;
  const double scale =
      reduction == Reduction::kMean ? 1.0 / std::max(cells, 1) : 1.0;
  double total = 0.0;
  for (int t = 0; t < n; ++t) {
    SC_CHECK(static_cast<int>(labels[t].size()) == k, "labels cols mismatch");
    for (int c = 0; c < k; ++c) {
      const double s = scores(t, c);
      const double y = labels[t][c] ? 1.0 : 0.0;
      // softplus(s) - y*s, stable for large |s|.
      const double softplus =
          s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
      total += (softplus - y * s) * scale;
      const double sigmoid = 1.0 / (1.0 + std::exp(-s));
      result.grad(t, c) = (sigmoid - y) * scale;
    }
  }
  result.loss = total;
  return result;
}

double TokenProbability(const EncoderLogits& logits, int position,
                        TokenId token, const Vocabulary& vocab) {
  SC_CHECK(vocab.InVocab(token), "token outside V");
  SC_CHECK(position >= 0 && position < logits.rows(), "position out of range");
  Eigen::RowVectorXd row = logits.row(position);
  double mx = row.maxCoeff();
  double lse = mx + std::log((row.array() - mx).exp().sum());
  return std::exp(row(token) - lse);
}

}  // namespace softcorrect
