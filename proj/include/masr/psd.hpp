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

#ifndef MASR_PSD_HPP_
#define MASR_PSD_HPP_

#include <string>
#include <utility>
#include <vector>

#include "masr/matrix.hpp"

namespace masr {

struct PsdConfig {
  double lambda = 8.0;  // blank-dominance threshold in nats
  int min_keep = 1;     // floor on output length when everything is blank
};

// Blank-dominance margin of one frame:
//   log p(blank) - max over non-blank units of log p(unit).
double psd_margin(const Matrix& logpost, int frame, int32_t blank = 0);

// Keeps frames whose margin is below lambda, in order, rows unmodified.
// When nothing qualifies, retains the cfg.min_keep frames with the smallest
// margin so downstream consumers never see an empty sequence.
// Returns the kept rows and their original indices.
std::pair<Matrix, std::vector<int>> psd_downsample(const Matrix& logpost,
                                                   const PsdConfig& cfg,
                                                   int32_t blank = 0);

// Total kept frames across `posts` for each threshold; lambdas must be
// ascending. Counts are non-decreasing in lambda.
std::vector<int64_t> frame_retention_curve(const std::vector<Matrix>& posts,
                                           const std::vector<double>& lambdas,
                                           int min_keep = 1, int32_t blank = 0);

// TSV report: lambda<TAB>frames_kept<TAB>fraction.
std::string retention_report_tsv(const std::vector<double>& lambdas,
                                 const std::vector<int64_t>& kept,
                                 int64_t total_frames);

}  // namespace masr

#endif  // MASR_PSD_HPP_
