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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "masr/error.hpp"
#include "masr/lexicon.hpp"
#include "masr/psd.hpp"
#include "masr/rng.hpp"

using namespace masr;

namespace {

Matrix row_logpost(std::initializer_list<double> probs) {
  Matrix m(1, static_cast<int>(probs.size()));
  int j = 0;
  for (double p : probs) m(0, j++) = std::log(p);
  return m;
}

Matrix random_logpost(int T, int V, Rng& rng) {
  Matrix logits(T, V);
  for (double& v : logits.data) v = rng.uniform(-4.0, 4.0);
  return log_softmax(logits);
}

}  // namespace

TEST_CASE("worked margin example straddles lambda 3 and 8") {
  Matrix frame = row_logpost({0.999, 0.0005, 0.0005});
  const double margin = psd_margin(frame, 0);
  CHECK(margin == doctest::Approx(std::log(0.999 / 0.0005)).epsilon(1e-12));
  CHECK(margin == doctest::Approx(7.60).epsilon(1e-3));

  auto kept8 = psd_downsample(frame, {8.0, 1}).second;
  CHECK(kept8 == std::vector<int>{0});

  // removed at lambda=3; the floor rule then retains it as the least
  // blank-dominated frame
  Matrix two(2, 3);
  std::memcpy(two.row(0), frame.row(0), 3 * sizeof(double));
  Matrix other = row_logpost({0.2, 0.5, 0.3});
  std::memcpy(two.row(1), other.row(0), 3 * sizeof(double));
  auto kept3 = psd_downsample(two, {3.0, 1}).second;
  CHECK(kept3 == std::vector<int>{1});
}

TEST_CASE("uniform frames have zero margin and are always kept") {
  Matrix frame = row_logpost({1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(psd_margin(frame, 0) == doctest::Approx(0.0));
  for (double lambda : {0.5, 3.0, 8.0, 15.0}) {
    CHECK(psd_downsample(frame, {lambda, 1}).second.size() == 1);
  }
}

TEST_CASE("infinite lambda keeps everything") {
  Rng rng(1);
  Matrix lp = random_logpost(20, 5, rng);
  auto [kept, idx] = psd_downsample(lp, {std::numeric_limits<double>::infinity(), 1});
  CHECK(kept.rows == lp.rows);
  for (int t = 0; t < lp.rows; ++t) CHECK(idx[t] == t);
}

TEST_CASE("empty input is an error") {
  Matrix empty(0, 4);
  CHECK_THROWS_AS(psd_downsample(empty, {8.0, 1}), DataError);
}

TEST_CASE("floor rule keeps the least blank-dominated frames") {
  Matrix lp(3, 3);
  auto set_row = [&](int t, double blank, double other) {
    lp(t, 0) = std::log(blank);
    lp(t, 1) = std::log(other / 2);
    lp(t, 2) = std::log(other / 2);
  };
  set_row(0, 0.98, 0.02);
  set_row(1, 0.90, 0.10);  // smallest margin
  set_row(2, 0.97, 0.03);
  auto kept = psd_downsample(lp, {-std::numeric_limits<double>::infinity(), 1}).second;
  CHECK(kept == std::vector<int>{1});
  auto kept2 = psd_downsample(lp, {-std::numeric_limits<double>::infinity(), 2}).second;
  CHECK(kept2 == std::vector<int>{1, 2});
}

TEST_CASE("kept rows are an order-preserving content-identical subsequence") {
  Rng rng(2);
  Matrix lp = random_logpost(40, 6, rng);
  auto [rows, idx] = psd_downsample(lp, {1.0, 1});
  REQUIRE(rows.rows == static_cast<int>(idx.size()));
  for (size_t i = 1; i < idx.size(); ++i) CHECK(idx[i] > idx[i - 1]);
  for (size_t i = 0; i < idx.size(); ++i) {
    for (int j = 0; j < lp.cols; ++j) {
      CHECK(rows(static_cast<int>(i), j) == lp(idx[i], j));
    }
  }
}

TEST_CASE("kept sets nest as lambda grows") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix lp = random_logpost(30, 5, rng);
    std::vector<int> prev;
    for (double lambda : {-2.0, 0.0, 1.0, 3.0, 8.0, 15.0}) {
      auto idx = psd_downsample(lp, {lambda, 1}).second;
      if (!prev.empty()) {
        CHECK(std::includes(idx.begin(), idx.end(), prev.begin(), prev.end()));
      }
      prev = idx;
    }
  }
}

TEST_CASE("margins of kept and removed frames respect the threshold") {
  Rng rng(4);
  Matrix lp = random_logpost(50, 4, rng);
  const double lambda = 1.5;
  auto idx = psd_downsample(lp, {lambda, 1}).second;
  std::vector<bool> is_kept(lp.rows, false);
  for (int t : idx) is_kept[t] = true;
  if (!idx.empty() && idx.size() != 1) {
    for (int t = 0; t < lp.rows; ++t) {
      const double m = psd_margin(lp, t);
      if (is_kept[t]) {
        CHECK(m < lambda);
      } else {
        CHECK(m >= lambda);
      }
    }
  }
}

TEST_CASE("one-hot oracle posteriors pass through unchanged") {
  LabelSeq p = {2, 3, 1, 4};
  Matrix oh = one_hot_posteriors(p, 5);
  for (double lambda : {0.5, 3.0, 8.0}) {
    auto [rows, idx] = psd_downsample(oh, {lambda, 1});
    CHECK(rows.rows == oh.rows);
  }
}

TEST_CASE("retention curve is flat for uniform frames and monotone in general") {
  Matrix uniform = row_logpost({0.25, 0.25, 0.25, 0.25});
  auto counts = frame_retention_curve({uniform}, {3.0, 8.0, 15.0});
  CHECK(counts == std::vector<int64_t>{1, 1, 1});

  Rng rng(5);
  std::vector<Matrix> posts;
  for (int i = 0; i < 10; ++i) posts.push_back(random_logpost(25, 5, rng));
  auto curve = frame_retention_curve(posts, {0.0, 1.0, 2.0, 4.0, 8.0});
  for (size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] >= curve[i - 1]);

  CHECK_THROWS_AS(frame_retention_curve(posts, {8.0, 3.0}), DataError);
}

TEST_CASE("retention at minus infinity is the floor times the sequence count") {
  Rng rng(6);
  std::vector<Matrix> posts;
  for (int i = 0; i < 7; ++i) posts.push_back(random_logpost(12, 5, rng));
  auto counts =
      frame_retention_curve(posts, {-std::numeric_limits<double>::infinity()}, 2);
  CHECK(counts[0] == 2 * 7);
}

TEST_CASE("tsv report shape") {
  std::string tsv = retention_report_tsv({3.0, 8.0}, {10, 20}, 40);
  CHECK(tsv.find("lambda\tframes_kept\tfraction") == 0);
  CHECK(tsv.find("3\t10\t0.25") != std::string::npos);
  CHECK(tsv.find("8\t20\t0.5") != std::string::npos);
}
