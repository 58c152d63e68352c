// softcorrect/numeric.h

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

#ifndef SOFTCORRECT_NUMERIC_H_
#define SOFTCORRECT_NUMERIC_H_

#include <Eigen/Dense>

namespace softcorrect {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Row-wise softmax / log-softmax with max subtraction.
Mat SoftmaxRows(const Mat& scores);
Mat LogSoftmaxRows(const Mat& scores);

// Given logp = LogSoftmaxRows(scores) and dL/dlogp, returns dL/dscores:
// grad - softmax .* rowsum(grad).
Mat LogSoftmaxBackward(const Mat& logp, const Mat& grad_logp);

}  // namespace softcorrect

#endif  // SOFTCORRECT_NUMERIC_H_
