// softcorrect/common.h

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

#ifndef SOFTCORRECT_COMMON_H_
#define SOFTCORRECT_COMMON_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace softcorrect {

using TokenId = int32_t;

// Log-space zero. A large negative sentinel instead of -inf so that
// sums never produce NaN.
constexpr double kLogZero = -1e30;

inline bool IsLogZero(double x) { return x <= kLogZero * 0.5; }

// log(exp(a) + exp(b)), safe against kLogZero on either side.
inline double LogAdd(double a, double b) {
  if (IsLogZero(a)) return b;
  if (IsLogZero(b)) return a;
  return (a > b) ? a + std::log1p(std::exp(b - a))
                 : b + std::log1p(std::exp(a - b));
}

// Raised on invalid configuration (bad probabilities, bad bounds,
// mismatched shapes requested by the caller).  Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised on unreadable, missing or malformed input data.  Exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when training diverges (non-finite losses persist).  Exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& msg)
      : std::runtime_error(msg) {}
};

#define SC_CHECK(cond, msg)                         \
  do {                                              \
    if (!(cond)) throw std::logic_error(msg);       \
  } while (0)

// 64-bit FNV-1a, used to derive sub-stream seeds and config hashes.
uint64_t Fnv1a64(const std::string& data);

// Deterministic random source.  All distribution transforms are
// implemented here rather than with std:: distributions so that a fixed
// seed gives byte-identical streams across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  // Derives an independent stream, e.g. Rng(seed).Fork("corrupt", 17).
  Rng Fork(const std::string& tag, uint64_t index = 0) const;

  uint64_t NextU64();
  // Uniform in [0, 1).
  double Uniform();
  // Uniform integer in [0, n).
  uint64_t UniformInt(uint64_t n);
  // Standard normal via Box-Muller.
  double Normal();
  // Gamma(shape, 1) via Marsaglia-Tsang, with the usual boost for shape < 1.
  double Gamma(double shape);
  // Beta(a, b) from two gamma draws.
  double Beta(double a, double b);

  template <typename T>
  void Shuffle(std::vector<T>* v) {
    for (size_t i = v->size(); i > 1; --i) {
      size_t j = static_cast<size_t>(UniformInt(i));
      std::swap((*v)[i - 1], (*v)[j]);
    }
  }

  std::string SerializeState() const;
  void RestoreState(const std::string& state);

 private:
  uint64_t seed_;   // creation seed, kept for Fork()
  uint64_t s_[4];   // xoshiro256** state
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Runs fn(i) for i in [0, n) on up to num_workers threads.  Results must
// be written to per-index slots by the caller; the iteration order within
// a worker is ascending, so any per-slot output is deterministic.
void ParallelFor(size_t n, int num_workers,
                 const std::function<void(size_t)>& fn);

// Static sharding variant for accumulation work: worker w handles indices
// w, w+W, w+2W, ... in ascending order, so per-worker accumulators see a
// fixed, run-independent reduction order.
void ParallelForStatic(size_t n, int num_workers,
                       const std::function<void(size_t, int)>& fn);

}  // namespace softcorrect

#endif  // SOFTCORRECT_COMMON_H_
