// softcorrect/numeric.cc

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

#include "softcorrect/numeric.h"

namespace softcorrect {

Mat LogSoftmaxRows(const Mat& scores) {
  Mat out = scores;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    double mx = out.row(r).maxCoeff();
    double lse = mx + std::log((out.row(r).array() - mx).exp().sum());
    out.row(r).array() -= lse;
  }
  return out;
}

Mat SoftmaxRows(const Mat& scores) {
  return LogSoftmaxRows(scores).array().exp();
}

Mat LogSoftmaxBackward(const Mat& logp, const Mat& grad_logp) {
  Mat softmax = logp.array().exp();
  Vec row_sums = grad_logp.rowwise().sum();
  Mat scaled = (softmax.array().colwise() * row_sums.array()).matrix();
  return grad_logp - scaled;
}

}  // namespace softcorrect
