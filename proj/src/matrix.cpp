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

#include "masr/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "masr/error.hpp"

namespace masr {

namespace {

void check_inner(int a_cols, int b_rows, const char* what) {
  if (a_cols != b_rows) {
    throw DimensionError(std::string(what) + ": inner dimensions differ (" +
                         std::to_string(a_cols) + " vs " + std::to_string(b_rows) + ")");
  }
}

}  // namespace

void matmul_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  check_inner(a.cols, b.rows, "matmul");
  if (c.rows != a.rows || c.cols != b.cols) {
    throw DimensionError("matmul: output shape mismatch");
  }
  const int n = b.cols;
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_inner(a.cols, b.rows, "matmul");
  Matrix c(a.rows, b.cols);
  matmul_acc(a, b, c);
  return c;
}

void matmul_at_b_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  check_inner(a.rows, b.rows, "matmul_at_b");
  if (c.rows != a.cols || c.cols != b.cols) {
    throw DimensionError("matmul_at_b: output shape mismatch");
  }
  const int n = b.cols;
  for (int k = 0; k < a.rows; ++k) {
    const double* arow = a.row(k);
    const double* brow = b.row(k);
    for (int i = 0; i < a.cols; ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      double* crow = c.row(i);
      for (int j = 0; j < n; ++j) crow[j] += aki * brow[j];
    }
  }
}

void matmul_a_bt_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  check_inner(a.cols, b.cols, "matmul_a_bt");
  if (c.rows != a.rows || c.cols != b.rows) {
    throw DimensionError("matmul_a_bt: output shape mismatch");
  }
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = b.row(j);
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      crow[j] += acc;
    }
  }
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  check_inner(a.cols, b.cols, "matmul_a_bt");
  Matrix c(a.rows, b.rows);
  matmul_a_bt_acc(a, b, c);
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

void axpy(double alpha, const Matrix& x, Matrix& y) {
  if (!x.same_shape(y)) throw DimensionError("axpy: shape mismatch");
  for (size_t i = 0; i < x.data.size(); ++i) y.data[i] += alpha * x.data[i];
}

double logsumexp(std::span<const double> xs) {
  double m = kLogZero;
  for (double x : xs) m = std::max(m, x);
  if (m == kLogZero) return kLogZero;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double logsumexp2(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == kLogZero) return kLogZero;
  return a + std::log1p(std::exp(b - a));
}

double logsumexp3(double a, double b, double c) {
  double m = std::max(a, std::max(b, c));
  if (m == kLogZero) return kLogZero;
  return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

Matrix log_softmax(const Matrix& m) {
  Matrix out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i) {
    const double* x = m.row(i);
    double* y = out.row(i);
    double mx = kLogZero;
    for (int j = 0; j < m.cols; ++j) mx = std::max(mx, x[j]);
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += std::exp(x[j] - mx);
    const double lse = mx + std::log(s);
    for (int j = 0; j < m.cols; ++j) y[j] = x[j] - lse;
  }
  return out;
}

bool all_finite(const Matrix& m) {
  for (double v : m.data)
    if (!std::isfinite(v)) return false;
  return true;
}

int argmax_row(const Matrix& m, int r) {
  const double* x = m.row(r);
  int best = 0;
  for (int j = 1; j < m.cols; ++j)
    if (x[j] > x[best]) best = j;
  return best;
}

}  // namespace masr
