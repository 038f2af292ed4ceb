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

#ifndef MASR_EVAL_HPP_
#define MASR_EVAL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "masr/types.hpp"
#include "masr/vocab.hpp"

namespace masr {

struct EditCounts {
  int64_t sub = 0;
  int64_t ins = 0;
  int64_t del = 0;
  int64_t total() const { return sub + ins + del; }
};

// Minimal Levenshtein operation counts. Ties in the backtrace prefer
// substitution over deletion over insertion, so counts are stable.
template <typename Tok>
EditCounts edit_distance(const std::vector<Tok>& ref, const std::vector<Tok>& hyp) {
  const int n = static_cast<int>(ref.size());
  const int m = static_cast<int>(hyp.size());
  // cell = (distance, sub, ins, del) chosen per the tie-break rule
  struct Cell {
    int32_t dist, sub, ins, del;
  };
  std::vector<Cell> dp(static_cast<size_t>(n + 1) * (m + 1));
  auto at = [&](int i, int j) -> Cell& { return dp[static_cast<size_t>(i) * (m + 1) + j]; };
  at(0, 0) = {0, 0, 0, 0};
  for (int j = 1; j <= m; ++j) at(0, j) = {j, 0, j, 0};
  for (int i = 1; i <= n; ++i) at(i, 0) = {i, 0, 0, i};
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      const bool match = ref[i - 1] == hyp[j - 1];
      Cell diag = at(i - 1, j - 1);
      diag.dist += match ? 0 : 1;
      diag.sub += match ? 0 : 1;
      Cell up = at(i - 1, j);  // ref token dropped: deletion
      up.dist += 1;
      up.del += 1;
      Cell left = at(i, j - 1);  // hyp token spurious: insertion
      left.dist += 1;
      left.ins += 1;
      Cell best = diag;  // substitution/match preferred
      if (up.dist < best.dist) best = up;
      if (left.dist < best.dist) best = left;
      at(i, j) = best;
    }
  }
  const Cell& c = at(n, m);
  return {c.sub, c.ins, c.del};
}

struct WerSubset {
  int64_t sub = 0, ins = 0, del = 0;
  int64_t ref_tokens = 0;
  int64_t sentences = 0;
  double wer() const {
    return ref_tokens == 0 ? 0.0
                           : 100.0 * static_cast<double>(sub + ins + del) /
                                 static_cast<double>(ref_tokens);
  }
};

struct WerReport {
  WerSubset all;
  WerSubset ivs;   // populated when a split vocabulary was given
  WerSubset oovs;  //
  bool split_present = false;

  std::string to_tsv() const;
  std::string to_table() const;  // aligned All / IVS / OOVS columns
};

// Scores hypothesis sentences against references pairwise. When split_vocab
// is non-null the references are partitioned into in-vocabulary sentences
// (IVS) and the rest (OOVS) and per-subset counts are reported.
WerReport score_corpus(const Corpus& refs, const Corpus& hyps,
                       const Vocabulary* split_vocab = nullptr);

}  // namespace masr

#endif  // MASR_EVAL_HPP_
