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

#ifndef MASR_PARAM_STORE_HPP_
#define MASR_PARAM_STORE_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "masr/matrix.hpp"
#include "masr/rng.hpp"

namespace masr {

struct ParamEntry {
  std::string name;
  Matrix value;
  Matrix grad;  // same shape as value
};

// Named parameter tensors with matching gradient accumulators. Iteration
// order is insertion order, which fixes checkpoint payload layout and makes
// every traversal deterministic.
class ParamStore {
 public:
  // Registers a zero-initialized parameter. Duplicate names are an error.
  Matrix& add(const std::string& name, int rows, int cols);

  // uniform(-k, k), k = 1/sqrt(fan_in)
  Matrix& add_uniform(const std::string& name, int rows, int cols, int fan_in, Rng& rng);

  bool has(const std::string& name) const { return index_.count(name) > 0; }
  Matrix& value(const std::string& name);
  const Matrix& value(const std::string& name) const;
  Matrix& grad(const std::string& name);
  const Matrix& grad(const std::string& name) const;

  void zero_grads();
  bool grads_finite() const;

  std::vector<ParamEntry>& entries() { return entries_; }
  const std::vector<ParamEntry>& entries() const { return entries_; }
  size_t total_size() const;
  int64_t step() const { return step_; }
  void bump_step() { ++step_; }

  // Global L2 norm of all gradients.
  double grad_norm() const;
  void scale_grads(double s);

 private:
  int find(const std::string& name) const;

  std::vector<ParamEntry> entries_;
  std::unordered_map<std::string, int> index_;
  int64_t step_ = 0;
};

// theta <- theta - lr * grad, then gradients are zeroed and the step counter
// advances. A non-finite gradient rejects the whole update.
void sgd_step(ParamStore& store, double lr);

// Max over parameter tensors of
//   || analytic - central-difference || / max(||analytic||, ||central||, 1e-8).
// `loss(true)` must return the loss and leave its gradient accumulated in the
// store; `loss(false)` must return the loss without touching gradients.
// eps is required to lie in [1e-7, 1e-4].
double grad_check(ParamStore& store, const std::function<double(bool)>& loss, double eps);

}  // namespace masr

#endif  // MASR_PARAM_STORE_HPP_
