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

#include "masr/param_store.hpp"

#include <cmath>

#include "masr/error.hpp"

namespace masr {

int ParamStore::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw DataError("unknown parameter: " + name);
  return it->second;
}

Matrix& ParamStore::add(const std::string& name, int rows, int cols) {
  if (index_.count(name)) throw DataError("duplicate parameter: " + name);
  index_[name] = static_cast<int>(entries_.size());
  entries_.push_back({name, Matrix(rows, cols), Matrix(rows, cols)});
  return entries_.back().value;
}

Matrix& ParamStore::add_uniform(const std::string& name, int rows, int cols,
                                int fan_in, Rng& rng) {
  Matrix& m = add(name, rows, cols);
  const double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : m.data) v = rng.uniform(-k, k);
  return m;
}

Matrix& ParamStore::value(const std::string& name) { return entries_[find(name)].value; }
const Matrix& ParamStore::value(const std::string& name) const {
  return entries_[find(name)].value;
}
Matrix& ParamStore::grad(const std::string& name) { return entries_[find(name)].grad; }
const Matrix& ParamStore::grad(const std::string& name) const {
  return entries_[find(name)].grad;
}

void ParamStore::zero_grads() {
  for (auto& e : entries_) e.grad.fill(0.0);
}

bool ParamStore::grads_finite() const {
  for (const auto& e : entries_)
    if (!all_finite(e.grad)) return false;
  return true;
}

size_t ParamStore::total_size() const {
  size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

double ParamStore::grad_norm() const {
  double s = 0.0;
  for (const auto& e : entries_)
    for (double g : e.grad.data) s += g * g;
  return std::sqrt(s);
}

void ParamStore::scale_grads(double s) {
  for (auto& e : entries_)
    for (double& g : e.grad.data) g *= s;
}

void sgd_step(ParamStore& store, double lr) {
  if (!store.grads_finite()) {
    throw NumericError("sgd_step: non-finite gradient, update rejected");
  }
  for (auto& e : store.entries()) {
    for (size_t i = 0; i < e.value.data.size(); ++i) {
      e.value.data[i] -= lr * e.grad.data[i];
    }
    e.grad.fill(0.0);
  }
  store.bump_step();
}

double grad_check(ParamStore& store, const std::function<double(bool)>& loss,
                  double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-4)) {
    throw DataError("grad_check: eps outside [1e-7, 1e-4]");
  }
  store.zero_grads();
  const double base = loss(true);
  if (!std::isfinite(base)) throw ProbeError("grad_check: non-finite loss at probe point");

  // Snapshot analytic gradients; the finite-difference probes below must not
  // see stale accumulations.
  std::vector<Matrix> analytic;
  analytic.reserve(store.entries().size());
  for (const auto& e : store.entries()) analytic.push_back(e.grad);

  // Per parameter tensor: || analytic - central || / max(||analytic||,
  // ||central||, 1e-8), maximized over tensors.
  double max_rel = 0.0;
  for (size_t p = 0; p < store.entries().size(); ++p) {
    Matrix& value = store.entries()[p].value;
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (size_t i = 0; i < value.data.size(); ++i) {
      const double orig = value.data[i];
      value.data[i] = orig + eps;
      const double fp = loss(false);
      value.data[i] = orig - eps;
      const double fm = loss(false);
      value.data[i] = orig;
      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        throw ProbeError("grad_check: non-finite loss near probe point");
      }
      const double numeric = (fp - fm) / (2.0 * eps);
      const double a = analytic[p].data[i];
      diff2 += (a - numeric) * (a - numeric);
      a2 += a * a;
      n2 += numeric * numeric;
    }
    const double denom = std::max({std::sqrt(a2), std::sqrt(n2), 1e-8});
    max_rel = std::max(max_rel, std::sqrt(diff2) / denom);
  }
  store.zero_grads();
  return max_rel;
}

}  // namespace masr
