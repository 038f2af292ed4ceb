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

#include "masr/psd.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <sstream>

#include "masr/error.hpp"

namespace masr {

double psd_margin(const Matrix& logpost, int frame, int32_t blank) {
  if (logpost.cols < 2) throw DataError("psd: posterior has no non-blank unit");
  const double* row = logpost.row(frame);
  double best = kLogZero;
  for (int j = 0; j < logpost.cols; ++j) {
    if (j == blank) continue;
    best = std::max(best, row[j]);
  }
  return row[blank] - best;
}

std::pair<Matrix, std::vector<int>> psd_downsample(const Matrix& logpost,
                                                   const PsdConfig& cfg,
                                                   int32_t blank) {
  if (logpost.rows == 0) throw DataError("psd: empty input sequence");
  if (cfg.min_keep < 1) throw DataError("psd: min_keep must be >= 1");

  std::vector<double> margins(logpost.rows);
  std::vector<int> kept;
  for (int t = 0; t < logpost.rows; ++t) {
    margins[t] = psd_margin(logpost, t, blank);
    if (margins[t] < cfg.lambda) kept.push_back(t);
  }
  if (kept.empty()) {
    // Floor rule: the least blank-dominated frames, earliest on ties.
    std::vector<int> idx(logpost.rows);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return margins[a] < margins[b]; });
    idx.resize(std::min<size_t>(idx.size(), static_cast<size_t>(cfg.min_keep)));
    std::sort(idx.begin(), idx.end());
    kept = std::move(idx);
  }

  Matrix out(static_cast<int>(kept.size()), logpost.cols);
  for (size_t i = 0; i < kept.size(); ++i) {
    std::memcpy(out.row(static_cast<int>(i)), logpost.row(kept[i]),
                sizeof(double) * static_cast<size_t>(logpost.cols));
  }
  return {std::move(out), std::move(kept)};
}

std::vector<int64_t> frame_retention_curve(const std::vector<Matrix>& posts,
                                           const std::vector<double>& lambdas,
                                           int min_keep, int32_t blank) {
  for (size_t i = 1; i < lambdas.size(); ++i) {
    if (lambdas[i] < lambdas[i - 1]) throw DataError("psd report: lambdas must be ascending");
  }
  std::vector<int64_t> counts(lambdas.size(), 0);
  for (const auto& post : posts) {
    for (size_t i = 0; i < lambdas.size(); ++i) {
      PsdConfig cfg{lambdas[i], min_keep};
      counts[i] += static_cast<int64_t>(psd_downsample(post, cfg, blank).second.size());
    }
  }
  return counts;
}

std::string retention_report_tsv(const std::vector<double>& lambdas,
                                 const std::vector<int64_t>& kept,
                                 int64_t total_frames) {
  std::ostringstream os;
  os << "lambda\tframes_kept\tfraction\n";
  for (size_t i = 0; i < lambdas.size(); ++i) {
    const double frac =
        total_frames > 0 ? static_cast<double>(kept[i]) / static_cast<double>(total_frames) : 0.0;
    os << lambdas[i] << "\t" << kept[i] << "\t" << frac << "\n";
  }
  return os.str();
}

}  // namespace masr
