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
#include "masr/matrix.hpp"
#include "masr/param_store.hpp"
#include "masr/rng.hpp"

using namespace masr;

namespace {

Matrix random_matrix(int r, int c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(lo, hi);
  return m;
}

// Independent element-wise oracle for the matrix product.
Matrix matmul_triple_loop(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j) {
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.same_shape(b));
  double m = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::fabs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace

TEST_CASE("matmul identity") {
  Rng rng(7);
  Matrix m = random_matrix(2, 5, rng);
  Matrix id(2, 2);
  id(0, 0) = id(1, 1) = 1.0;
  CHECK(max_abs_diff(matmul(id, m), m) == 0.0);
}

TEST_CASE("matmul small example") {
  Matrix a(2, 2);
  a(0, 0) = 1; a(0, 1) = 2; a(1, 0) = 3; a(1, 1) = 4;
  Matrix b(2, 1);
  b(0, 0) = 0; b(1, 0) = 1;
  Matrix c = matmul(a, b);
  CHECK(c(0, 0) == 2.0);
  CHECK(c(1, 0) == 4.0);
}

TEST_CASE("matmul agrees with triple-loop oracle") {
  Rng rng(11);
  Matrix a = random_matrix(5, 7, rng);
  Matrix b = random_matrix(7, 3, rng);
  CHECK(max_abs_diff(matmul(a, b), matmul_triple_loop(a, b)) < 1e-12);
}

TEST_CASE("matmul shape mismatch") {
  Matrix a(2, 3), b(2, 3);
  CHECK_THROWS_AS(matmul(a, b), DimensionError);
}

TEST_CASE("matmul associativity") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = random_matrix(4, 6, rng);
    Matrix b = random_matrix(6, 5, rng);
    Matrix c = random_matrix(5, 3, rng);
    CHECK(max_abs_diff(matmul(matmul(a, b), c), matmul(a, matmul(b, c))) < 1e-9);
  }
}

TEST_CASE("transposed product variants agree with the plain product") {
  Rng rng(17);
  Matrix a = random_matrix(4, 6, rng);
  Matrix b = random_matrix(6, 5, rng);
  CHECK(max_abs_diff(matmul_a_bt(a, transpose(b)), matmul(a, b)) < 1e-12);
  Matrix c(4, 5);
  matmul_at_b_acc(transpose(a), b, c);
  CHECK(max_abs_diff(c, matmul(a, b)) < 1e-12);
}

TEST_CASE("log_softmax symmetric two-way split") {
  Matrix x(1, 2);
  Matrix y = log_softmax(x);
  CHECK(y(0, 0) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(y(0, 1) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("log_softmax survives large magnitudes") {
  Matrix x(1, 2);
  x(0, 0) = 1000.0;
  x(0, 1) = 0.0;
  Matrix y = log_softmax(x);
  CHECK(all_finite(y));
  CHECK(y(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(y(0, 1) == doctest::Approx(-1000.0).epsilon(1e-12));
}

TEST_CASE("log_softmax rows are normalized") {
  Rng rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x = random_matrix(3, 3, rng, -30.0, 30.0);
    Matrix y = log_softmax(x);
    for (int i = 0; i < y.rows; ++i) {
      double s = 0.0;
      for (int j = 0; j < y.cols; ++j) s += std::exp(y(i, j));
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::fabs(logsumexp(y.row_span(i))) < 1e-12);
    }
  }
}

TEST_CASE("log_softmax shift invariance") {
  Rng rng(23);
  Matrix x = random_matrix(2, 5, rng, -5.0, 5.0);
  Matrix shifted = x;
  for (double& v : shifted.data) v += 123.0;
  CHECK(max_abs_diff(log_softmax(x), log_softmax(shifted)) < 1e-10);
}

TEST_CASE("grad_check on a quadratic is near-exact") {
  ParamStore ps;
  ps.add("theta", 1, 1)(0, 0) = 3.0;
  auto loss = [&](bool with_grad) {
    const double th = ps.value("theta")(0, 0);
    if (with_grad) ps.grad("theta")(0, 0) += 2.0 * th;
    return th * th;
  };
  CHECK(grad_check(ps, loss, 1e-5) < 1e-9);
}

TEST_CASE("grad_check rejects eps outside its window") {
  ParamStore ps;
  ps.add("theta", 1, 1);
  auto loss = [&](bool) { return 0.0; };
  CHECK_THROWS_AS(grad_check(ps, loss, 1e-2), DataError);
  CHECK_THROWS_AS(grad_check(ps, loss, 1e-9), DataError);
}

TEST_CASE("grad_check flags a non-finite probe") {
  ParamStore ps;
  ps.add("theta", 1, 1);
  auto loss = [&](bool) { return std::nan(""); };
  CHECK_THROWS_AS(grad_check(ps, loss, 1e-5), ProbeError);
}

TEST_CASE("sgd_step basic update") {
  ParamStore ps;
  ps.add("theta", 1, 1)(0, 0) = 1.0;
  ps.grad("theta")(0, 0) = 2.0;
  sgd_step(ps, 0.1);
  CHECK(ps.value("theta")(0, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(ps.grad("theta")(0, 0) == 0.0);
  CHECK(ps.step() == 1);
}

TEST_CASE("sgd_step with zero learning rate is the identity") {
  ParamStore ps;
  ps.add("theta", 2, 2)(1, 1) = 4.0;
  ps.grad("theta")(1, 1) = 100.0;
  sgd_step(ps, 0.0);
  CHECK(ps.value("theta")(1, 1) == 4.0);
}

TEST_CASE("sgd_step rejects non-finite gradients") {
  ParamStore ps;
  ps.add("theta", 1, 1)(0, 0) = 1.0;
  ps.grad("theta")(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(sgd_step(ps, 0.1), NumericError);
  CHECK(ps.value("theta")(0, 0) == 1.0);  // update rejected, value untouched
}

TEST_CASE("sgd on a quadratic decreases the loss monotonically") {
  ParamStore ps;
  ps.add("theta", 1, 1)(0, 0) = 2.0;
  auto loss_value = [&]() {
    const double th = ps.value("theta")(0, 0);
    return (th - 0.5) * (th - 0.5);
  };
  double prev = loss_value();
  for (int i = 0; i < 2; ++i) {
    ps.grad("theta")(0, 0) = 2.0 * (ps.value("theta")(0, 0) - 0.5);
    sgd_step(ps, 0.1);
    const double cur = loss_value();
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("uniform init is deterministic for a fixed seed") {
  ParamStore a, b;
  Rng r1(42), r2(42);
  a.add_uniform("w", 3, 4, 4, r1);
  b.add_uniform("w", 3, 4, 4, r2);
  CHECK(max_abs_diff(a.value("w"), b.value("w")) == 0.0);
  const double k = 1.0 / std::sqrt(4.0);
  for (double v : a.value("w").data) {
    CHECK(v >= -k);
    CHECK(v <= k);
  }
}
