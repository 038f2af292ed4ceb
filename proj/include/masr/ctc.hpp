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

#ifndef MASR_CTC_HPP_
#define MASR_CTC_HPP_

#include <cstdint>
#include <vector>

#include "masr/matrix.hpp"
#include "masr/types.hpp"

namespace masr {

// The merge function: collapse consecutive repeats, then delete blanks.
LabelSeq merge_beta(const LabelSeq& alignment, int32_t blank = 0);

// Blank-augmented forward/backward lattice for one (posterior, target) pair.
// alpha(t,s) and beta(t,s) both include the emission at frame t, so the two
// totals are independent routes to the same log-likelihood.
struct CtcLattice {
  LabelSeq augmented;  // blank-interleaved target, length 2N+1
  Matrix alpha;        // T x (2N+1), log scores
  Matrix beta;         // T x (2N+1), log scores
  double forward_total = kLogZero;
  double backward_total = kLogZero;
};

// logpost: T x V log posteriors (row-stochastic under exp); target: blank-free.
// Throws InfeasibleTargetError when T < N + (adjacent repeats).
CtcLattice ctc_lattice(const Matrix& logpost, const LabelSeq& target, int32_t blank = 0);

// Negative log-likelihood summed over all alignments that merge to `target`.
double ctc_loss(const Matrix& logpost, const LabelSeq& target, int32_t blank = 0);

// Gradient of ctc_loss with respect to the pre-softmax logits that produced
// `logpost`. Optionally reports the loss through `loss_out`.
Matrix ctc_grad(const Matrix& logpost, const LabelSeq& target, int32_t blank = 0,
                double* loss_out = nullptr);

// Exhaustive-enumeration oracle: sums path products over every length-T
// alignment whose merge equals `target`. Infeasible targets yield +inf.
// Guards at vocab^T <= 1e7 and throws OracleScaleError above that.
double ctc_loss_bruteforce(const Matrix& logpost, const LabelSeq& target,
                           int32_t blank = 0);

// Best-path decode: per-frame argmax (ties toward the lowest index), merged.
LabelSeq greedy_decode(const Matrix& logpost, int32_t blank = 0);

}  // namespace masr

#endif  // MASR_CTC_HPP_
