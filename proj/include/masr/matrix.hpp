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

#ifndef MASR_MATRIX_HPP_
#define MASR_MATRIX_HPP_

#include <cassert>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace masr {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// Dense row-major double matrix. All network activations and posteriors live
// in this type; log-space matrices may contain -inf, everything else is
// expected to stay finite.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {
    assert(r >= 0 && c >= 0);
  }

  double& operator()(int r, int c) {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return data[static_cast<size_t>(r) * cols + c];
  }
  double operator()(int r, int c) const {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return data[static_cast<size_t>(r) * cols + c];
  }

  double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

  std::span<const double> row_span(int r) const { return {row(r), static_cast<size_t>(cols)}; }

  size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// c = a * b with 64-bit accumulation. Throws DimensionError on mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

// c += a * b
void matmul_acc(const Matrix& a, const Matrix& b, Matrix& c);

// c (+)= a^T * b
void matmul_at_b_acc(const Matrix& a, const Matrix& b, Matrix& c);

// c = a * b^T;  c (+)= a * b^T
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);
void matmul_a_bt_acc(const Matrix& a, const Matrix& b, Matrix& c);

Matrix transpose(const Matrix& a);

// y += alpha * x (same shape)
void axpy(double alpha, const Matrix& x, Matrix& y);

// Row-wise log-softmax with max subtraction; each output row satisfies
// logsumexp(row) == 0 up to rounding.
Matrix log_softmax(const Matrix& m);

double logsumexp(std::span<const double> xs);
double logsumexp2(double a, double b);
double logsumexp3(double a, double b, double c);

bool all_finite(const Matrix& m);

// Index of the row maximum; ties break toward the lowest index.
int argmax_row(const Matrix& m, int r);

}  // namespace masr

#endif  // MASR_MATRIX_HPP_
