// softcorrect/cctc.cc

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

#include "softcorrect/cctc.h"

#include <algorithm>
#include <limits>

namespace softcorrect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimal CTC path length for a token span: one frame per token plus a
// blank between adjacent equal tokens.
int MinFramesForSpan(const std::vector<TokenId>& target, int begin, int end) {
  int need = end - begin;
  for (int i = begin + 1; i < end; ++i) {
    if (target[i] == target[i - 1]) ++need;
  }
  return need;
}

}  // namespace

ExpandedInput ExpandInput(const std::vector<TokenId>& candidate,
                          const std::vector<bool>& error_flags, TokenId phi,
                          int repeat) {
  SC_CHECK(candidate.size() == error_flags.size(),
           "flags length differs from candidate length");
  SC_CHECK(repeat >= 1, "repeat must be at least 1");
  ExpandedInput out;
  out.repeat = repeat;
  const int n = static_cast<int>(candidate.size());
  int unit = 0;
  for (int t = 0; t < n;) {
    if (!error_flags[t]) {
      if (candidate[t] != phi)
        out.frames.push_back({candidate[t], -1, -1, unit++});
      ++t;
    } else {
      const int seg = static_cast<int>(out.segments.size());
      out.segments.push_back({0, 0});
      while (t < n && error_flags[t]) {
        for (int r = 0; r < repeat; ++r)
          out.frames.push_back({candidate[t], seg, -1, unit});
        ++t;
      }
      ++unit;
    }
  }
  return out;
}

ExpandedInput ExpandInput(const std::vector<TokenId>& candidate,
                          const OracleLabels& labels, TokenId phi,
                          int repeat) {
  SC_CHECK(candidate.size() == labels.error.size(),
           "labels do not match candidate length");
  SC_CHECK(repeat >= 1, "repeat must be at least 1");
  ExpandedInput out;
  out.repeat = repeat;
  out.has_target = true;
  out.target = labels.target;
  const int n = static_cast<int>(candidate.size());
  int unit = 0;
  int cursor = 0;  // next target position
  size_t run_idx = 0;
  for (int t = 0; t < n;) {
    if (!labels.error[t]) {
      if (candidate[t] != phi) {
        SC_CHECK(cursor < static_cast<int>(out.target.size()) &&
                     out.target[cursor] == candidate[t],
                 "anchor token does not match the target");
        out.frames.push_back({candidate[t], -1, cursor, unit++});
        ++cursor;
      }
      ++t;
      continue;
    }
    SC_CHECK(run_idx < labels.runs.size() &&
                 labels.runs[run_idx].begin_col == t,
             "flag runs out of sync with labels");
    const OracleLabels::Run& run = labels.runs[run_idx++];
    SC_CHECK(run.span_begin == cursor, "span does not continue the target");
    const int seg = static_cast<int>(out.segments.size());
    out.segments.push_back({run.span_begin, run.span_end});
    int frame_count = 0;
    for (int c = run.begin_col; c < run.end_col; ++c) {
      for (int r = 0; r < repeat; ++r)
        out.frames.push_back({candidate[c], seg, -1, unit});
      frame_count += repeat;
    }
    ++unit;
    const int need = MinFramesForSpan(out.target, run.span_begin, run.span_end);
    if (need > frame_count) {
      throw CapacityError("target span of " +
                          std::to_string(run.span_end - run.span_begin) +
                          " tokens needs " + std::to_string(need) +
                          " frames but the segment has " +
                          std::to_string(frame_count));
    }
    cursor = run.span_end;
    t = run.end_col;
  }
  SC_CHECK(cursor == static_cast<int>(out.target.size()),
           "spans and anchors do not cover the target");
  return out;
}

ExpandedInput MakeUnconstrainedInput(const std::vector<TokenId>& candidate,
                                     const std::vector<TokenId>& target,
                                     bool has_target, int repeat) {
  SC_CHECK(repeat >= 1, "repeat must be at least 1");
  ExpandedInput out;
  out.repeat = repeat;
  out.has_target = has_target;
  if (has_target) out.target = target;
  out.segments.push_back({0, static_cast<int>(out.target.size())});
  for (TokenId tok : candidate) {
    for (int r = 0; r < repeat; ++r) out.frames.push_back({tok, 0, -1, 0});
  }
  return out;
}

namespace {

// Allowed trellis state interval per frame over the standard CTC state
// chain (blanks at even indices, target labels at odd).
struct StateWindows {
  std::vector<int> lo, hi;
};

StateWindows BuildWindows(const ExpandedInput& x) {
  const int num_states = 2 * static_cast<int>(x.target.size()) + 1;
  StateWindows w;
  w.lo.reserve(x.frames.size());
  w.hi.reserve(x.frames.size());
  for (const auto& f : x.frames) {
    if (f.segment < 0) {
      SC_CHECK(f.slot >= 0, "anchor frame without a target slot");
      w.lo.push_back(2 * f.slot + 1);
      w.hi.push_back(2 * f.slot + 1);
    } else {
      const auto& seg = x.segments[f.segment];
      w.lo.push_back(2 * seg.span_begin);
      w.hi.push_back(2 * seg.span_end);
    }
    SC_CHECK(w.hi.back() < num_states, "state window out of range");
  }
  return w;
}

}  // namespace

LossResult ConstrainedCtcLoss(const FrameLogProbs& logp,
                              const ExpandedInput& x) {
  SC_CHECK(x.has_target, "constrained CTC needs a target");
  const int num_frames = x.num_frames();
  const int num_labels = static_cast<int>(x.target.size());
  const int num_states = 2 * num_labels + 1;
  const int blank = static_cast<int>(logp.cols()) - 1;

  LossResult result;
  result.grad = Mat::Zero(logp.rows(), logp.cols());
  if (num_frames == 0) {
    result.loss = num_labels == 0 ? 0.0 : kInf;
    return result;
  }
  SC_CHECK(logp.rows() == num_frames, "logp rows differ from frame count");

  StateWindows w = BuildWindows(x);
  auto cls = [&](int s) -> int {
    return (s % 2 == 0) ? blank : x.target[(s - 1) / 2];
  };
  // Skip transition p -> p+2 between label states: legal when the labels
  // differ (classic CTC) or when the frames belong to different collapse
  // units (the emissions would not merge).
  auto skip_ok = [&](int s, int t) {
    if (s % 2 == 0) return false;
    if (x.frames[t - 1].unit != x.frames[t].unit) return true;
    return x.target[(s - 1) / 2] != x.target[(s - 3) / 2];
  };

  Mat alpha = Mat::Constant(num_frames, num_states, kLogZero);
  for (int s = 0; s <= 1 && s < num_states; ++s) {
    if (s >= w.lo[0] && s <= w.hi[0]) alpha(0, s) = logp(0, cls(s));
  }
  for (int t = 1; t < num_frames; ++t) {
    for (int s = w.lo[t]; s <= w.hi[t]; ++s) {
      double acc = kLogZero;
      for (int p = s; p >= s - 2 && p >= 0; --p) {
        if (p < w.lo[t - 1] || p > w.hi[t - 1]) continue;
        if (p == s - 2 && !skip_ok(s, t)) continue;
        acc = LogAdd(acc, alpha(t - 1, p));
      }
      if (!IsLogZero(acc)) alpha(t, s) = acc + logp(t, cls(s));
    }
  }

  double log_total = kLogZero;
  for (int s = std::max(0, num_states - 2); s < num_states; ++s) {
    if (s >= w.lo[num_frames - 1] && s <= w.hi[num_frames - 1])
      log_total = LogAdd(log_total, alpha(num_frames - 1, s));
  }
  if (IsLogZero(log_total)) {
    result.loss = kInf;
    return result;
  }
  result.loss = -log_total;

  Mat beta = Mat::Constant(num_frames, num_states, kLogZero);
  for (int s = std::max(0, num_states - 2); s < num_states; ++s) {
    if (s >= w.lo[num_frames - 1] && s <= w.hi[num_frames - 1])
      beta(num_frames - 1, s) = 0.0;
  }
  for (int t = num_frames - 2; t >= 0; --t) {
    for (int s = w.lo[t]; s <= w.hi[t]; ++s) {
      double acc = kLogZero;
      for (int n = s; n <= s + 2 && n < num_states; ++n) {
        if (n < w.lo[t + 1] || n > w.hi[t + 1]) continue;
        if (n == s + 2 && !skip_ok(n, t + 1)) continue;
        if (IsLogZero(beta(t + 1, n))) continue;
        acc = LogAdd(acc, beta(t + 1, n) + logp(t + 1, cls(n)));
      }
      beta(t, s) = acc;
    }
  }

  for (int t = 0; t < num_frames; ++t) {
    std::vector<double> per_class(logp.cols(), kLogZero);
    for (int s = w.lo[t]; s <= w.hi[t]; ++s) {
      if (IsLogZero(alpha(t, s)) || IsLogZero(beta(t, s))) continue;
      int c = cls(s);
      per_class[c] = LogAdd(per_class[c], alpha(t, s) + beta(t, s));
    }
    for (int c = 0; c < logp.cols(); ++c) {
      if (!IsLogZero(per_class[c]))
        result.grad(t, c) = -std::exp(per_class[c] - log_total);
    }
  }
  return result;
}

LossResult StandardCtcLoss(const FrameLogProbs& logp,
                           const std::vector<TokenId>& target) {
  const int num_frames = static_cast<int>(logp.rows());
  const int num_labels = static_cast<int>(target.size());
  const int num_states = 2 * num_labels + 1;
  const int blank = static_cast<int>(logp.cols()) - 1;

  LossResult result;
  result.grad = Mat::Zero(logp.rows(), logp.cols());
  if (num_frames == 0) {
    result.loss = num_labels == 0 ? 0.0 : kInf;
    return result;
  }

  auto cls = [&](int s) -> int {
    return (s % 2 == 0) ? blank : target[(s - 1) / 2];
  };
  auto skip_ok = [&](int s) {
    return s % 2 == 1 && s >= 3 && target[(s - 1) / 2] != target[(s - 3) / 2];
  };

  Mat alpha = Mat::Constant(num_frames, num_states, kLogZero);
  for (int s = 0; s <= 1 && s < num_states; ++s) alpha(0, s) = logp(0, cls(s));
  for (int t = 1; t < num_frames; ++t) {
    for (int s = 0; s < num_states; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = LogAdd(acc, alpha(t - 1, s - 1));
      if (s >= 2 && skip_ok(s)) acc = LogAdd(acc, alpha(t - 1, s - 2));
      if (!IsLogZero(acc)) alpha(t, s) = acc + logp(t, cls(s));
    }
  }

  double log_total = alpha(num_frames - 1, num_states - 1);
  if (num_states >= 2)
    log_total = LogAdd(log_total, alpha(num_frames - 1, num_states - 2));
  if (IsLogZero(log_total)) {
    result.loss = kInf;
    return result;
  }
  result.loss = -log_total;

  Mat beta = Mat::Constant(num_frames, num_states, kLogZero);
  beta(num_frames - 1, num_states - 1) = 0.0;
  if (num_states >= 2) beta(num_frames - 1, num_states - 2) = 0.0;
  for (int t = num_frames - 2; t >= 0; --t) {
    for (int s = 0; s < num_states; ++s) {
      double acc = kLogZero;
      for (int n = s; n <= s + 2 && n < num_states; ++n) {
        if (n == s + 2 && !skip_ok(n)) continue;
        if (IsLogZero(beta(t + 1, n))) continue;
        acc = LogAdd(acc, beta(t + 1, n) + logp(t + 1, cls(n)));
      }
      beta(t, s) = acc;
    }
  }

  for (int t = 0; t < num_frames; ++t) {
    std::vector<double> per_class(logp.cols(), kLogZero);
    for (int s = 0; s < num_states; ++s) {
      if (IsLogZero(alpha(t, s)) || IsLogZero(beta(t, s))) continue;
      int c = cls(s);
      per_class[c] = LogAdd(per_class[c], alpha(t, s) + beta(t, s));
    }
    for (int c = 0; c < logp.cols(); ++c) {
      if (!IsLogZero(per_class[c]))
        result.grad(t, c) = -std::exp(per_class[c] - log_total);
    }
  }
  return result;
}

double BruteForceLoss(const FrameLogProbs& logp, const ExpandedInput& x) {
  SC_CHECK(x.has_target, "brute force needs a target");
  const int num_frames = x.num_frames();
  const int classes = static_cast<int>(logp.cols());
  const int blank = classes - 1;
  if (num_frames > 8) throw ConfigError("brute force bound: at most 8 frames");
  if (classes > 6) throw ConfigError("brute force bound: at most 6 classes");
  if (num_frames == 0) return x.target.empty() ? 0.0 : kInf;
  SC_CHECK(logp.rows() == num_frames, "logp rows differ from frame count");

  std::vector<int> free_pos;
  std::vector<int> emission(num_frames, blank);
  for (int t = 0; t < num_frames; ++t) {
    if (x.frames[t].segment < 0) {
      SC_CHECK(x.frames[t].token >= 0 && x.frames[t].token < blank,
               "anchor token outside the decoder vocabulary");
      emission[t] = x.frames[t].token;
    } else {
      free_pos.push_back(t);
    }
  }

  std::vector<TokenId> collapsed;
  collapsed.reserve(num_frames);
  double log_total = kLogZero;
  std::vector<int> choice(free_pos.size(), 0);
  for (;;) {
    for (size_t i = 0; i < free_pos.size(); ++i)
      emission[free_pos[i]] = choice[i];
    // Collapse under the unit rule.
    collapsed.clear();
    int prev = blank;
    int prev_unit = std::numeric_limits<int>::min();
    for (int t = 0; t < num_frames; ++t) {
      const int z = emission[t];
      const int u = x.frames[t].unit;
      if (z != blank && !(z == prev && u == prev_unit)) collapsed.push_back(z);
      prev = z;
      prev_unit = u;
    }
    if (collapsed.size() == x.target.size() &&
        std::equal(collapsed.begin(), collapsed.end(), x.target.begin())) {
      double lp = 0.0;
      for (int t = 0; t < num_frames; ++t) lp += logp(t, emission[t]);
      log_total = LogAdd(log_total, lp);
    }
    // Odometer.
    size_t i = 0;
    for (; i < choice.size(); ++i) {
      if (++choice[i] < classes) break;
      choice[i] = 0;
    }
    if (i == choice.size()) break;
  }
  return IsLogZero(log_total) ? kInf : -log_total;
}

DecodeResult ConstrainedGreedyDecode(const FrameLogProbs& logp,
                                     const ExpandedInput& x) {
  const int num_frames = x.num_frames();
  SC_CHECK(logp.rows() == num_frames, "logp rows differ from frame count");
  const int blank = static_cast<int>(logp.cols()) - 1;
  DecodeResult result;
  result.segment_outputs.resize(x.segments.size());
  int prev = blank;
  int prev_unit = std::numeric_limits<int>::min();
  for (int t = 0; t < num_frames; ++t) {
    const auto& frame = x.frames[t];
    if (frame.segment < 0) {
      result.output.push_back(frame.token);
      prev = frame.token;
      prev_unit = frame.unit;
      continue;
    }
    int best = 0;
    double best_score = logp(t, 0);
    for (int c = 1; c < logp.cols(); ++c) {
      if (logp(t, c) > best_score) {
        best_score = logp(t, c);
        best = c;
      }
    }
    if (best != blank && !(best == prev && frame.unit == prev_unit)) {
      result.output.push_back(best);
      result.segment_outputs[frame.segment].push_back(best);
    }
    prev = best;
    prev_unit = frame.unit;
  }
  return result;
}

}  // namespace softcorrect
