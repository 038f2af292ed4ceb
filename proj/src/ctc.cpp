// Copyright 2026 The masr Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "masr/ctc.hpp"

#include <cmath>
#include <string>

#include "masr/error.hpp"

namespace masr {

namespace {

// T >= N + number of adjacent equal pairs in the target.
int min_feasible_frames(const LabelSeq& target) {
  int repeats = 0;
  for (size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++repeats;
  return static_cast<int>(target.size()) + repeats;
}

void check_target(const Matrix& logpost, const LabelSeq& target, int32_t blank) {
  for (int32_t l : target) {
    if (l == blank) throw DataError("ctc: target contains the blank label");
    if (l < 0 || l >= logpost.cols) throw DataError("ctc: target label out of range");
  }
}

LabelSeq augment_with_blanks(const LabelSeq& target, int32_t blank) {
  LabelSeq aug;
  aug.reserve(2 * target.size() + 1);
  aug.push_back(blank);
  for (int32_t l : target) {
    aug.push_back(l);
    aug.push_back(blank);
  }
  return aug;
}

}  // namespace

LabelSeq merge_beta(const LabelSeq& alignment, int32_t blank) {
  LabelSeq out;
  int32_t prev = blank - 1;  // sentinel unequal to anything that follows
  bool first = true;
  for (int32_t l : alignment) {
    if (!first && l == prev) continue;
    prev = l;
    first = false;
    if (l != blank) out.push_back(l);
  }
  return out;
}

CtcLattice ctc_lattice(const Matrix& logpost, const LabelSeq& target, int32_t blank) {
  check_target(logpost, target, blank);
  const int T = logpost.rows;
  if (T < min_feasible_frames(target)) {
    throw InfeasibleTargetError("ctc: target of length " +
                                std::to_string(target.size()) +
                                " cannot align to " + std::to_string(T) + " frames");
  }

  CtcLattice lat;
  lat.augmented = augment_with_blanks(target, blank);
  const int S = static_cast<int>(lat.augmented.size());
  if (T == 0) {
    // Only the empty target is feasible here; the empty product has mass 1.
    lat.forward_total = 0.0;
    lat.backward_total = 0.0;
    return lat;
  }

  const LabelSeq& aug = lat.augmented;
  // Skips between lattice states are allowed only across a blank separating
  // two distinct labels; this is the standard 2-or-3 predecessor rule.
  auto can_skip = [&](int s) {
    return s >= 2 && aug[s] != blank && aug[s] != aug[s - 2];
  };

  lat.alpha = Matrix(T, S, kLogZero);
  lat.beta = Matrix(T, S, kLogZero);
  Matrix& alpha = lat.alpha;
  Matrix& beta = lat.beta;

  alpha(0, 0) = logpost(0, aug[0]);
  if (S > 1) alpha(0, 1) = logpost(0, aug[1]);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = logsumexp2(a, alpha(t - 1, s - 1));
      if (can_skip(s)) a = logsumexp2(a, alpha(t - 1, s - 2));
      alpha(t, s) = (a == kLogZero) ? kLogZero : a + logpost(t, aug[s]);
    }
  }
  lat.forward_total = logsumexp2(alpha(T - 1, S - 1), S > 1 ? alpha(T - 1, S - 2) : kLogZero);

  beta(T - 1, S - 1) = logpost(T - 1, aug[S - 1]);
  if (S > 1) beta(T - 1, S - 2) = logpost(T - 1, aug[S - 2]);
  for (int t = T - 2; t >= 0; --t) {
    for (int s = S - 1; s >= 0; --s) {
      double b = beta(t + 1, s);
      if (s + 1 < S) b = logsumexp2(b, beta(t + 1, s + 1));
      if (s + 2 < S && can_skip(s + 2)) b = logsumexp2(b, beta(t + 1, s + 2));
      beta(t, s) = (b == kLogZero) ? kLogZero : b + logpost(t, aug[s]);
    }
  }
  lat.backward_total = logsumexp2(beta(0, 0), S > 1 ? beta(0, 1) : kLogZero);

  return lat;
}

double ctc_loss(const Matrix& logpost, const LabelSeq& target, int32_t blank) {
  CtcLattice lat = ctc_lattice(logpost, target, blank);
  return -lat.forward_total;
}

Matrix ctc_grad(const Matrix& logpost, const LabelSeq& target, int32_t blank,
                double* loss_out) {
  CtcLattice lat = ctc_lattice(logpost, target, blank);
  if (loss_out) *loss_out = -lat.forward_total;

  const int T = logpost.rows;
  const int V = logpost.cols;
  const int S = static_cast<int>(lat.augmented.size());
  const double log_p = lat.forward_total;

  // d(-log P)/d logit_{t,k} = softmax_{t,k} - q_{t,k}, where q is the
  // occupancy of label k at frame t. alpha and beta both carry the frame-t
  // emission, so one copy is divided back out.
  Matrix grad(T, V);
  for (int t = 0; t < T; ++t) {
    std::vector<double> occ(V, kLogZero);
    for (int s = 0; s < S; ++s) {
      const double a = lat.alpha(t, s);
      const double b = lat.beta(t, s);
      if (a == kLogZero || b == kLogZero) continue;
      const int32_t k = lat.augmented[s];
      occ[k] = logsumexp2(occ[k], a + b - logpost(t, k));
    }
    for (int k = 0; k < V; ++k) {
      const double q = (occ[k] == kLogZero) ? 0.0 : std::exp(occ[k] - log_p);
      grad(t, k) = std::exp(logpost(t, k)) - q;
    }
  }
  return grad;
}

double ctc_loss_bruteforce(const Matrix& logpost, const LabelSeq& target,
                           int32_t blank) {
  check_target(logpost, target, blank);
  const int T = logpost.rows;
  const int V = logpost.cols;
  double paths = 1.0;
  for (int t = 0; t < T; ++t) {
    paths *= static_cast<double>(V);
    if (paths > 1e7) throw OracleScaleError("ctc oracle: vocab^T exceeds 1e7");
  }

  double total = kLogZero;
  LabelSeq path(T, 0);
  while (true) {
    if (merge_beta(path, blank) == target) {
      double lp = 0.0;
      for (int t = 0; t < T; ++t) lp += logpost(t, path[t]);
      total = logsumexp2(total, lp);
    }
    // odometer
    int t = T - 1;
    while (t >= 0 && path[t] == V - 1) path[t--] = 0;
    if (t < 0) break;
    ++path[t];
  }
  return -total;  // +inf when no path merges to the target
}

LabelSeq greedy_decode(const Matrix& logpost, int32_t blank) {
  LabelSeq best(logpost.rows);
  for (int t = 0; t < logpost.rows; ++t) best[t] = argmax_row(logpost, t);
  return merge_beta(best, blank);
}

}  // namespace masr
