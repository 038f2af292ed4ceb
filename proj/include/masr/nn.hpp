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

#ifndef MASR_NN_HPP_
#define MASR_NN_HPP_

#include <string>
#include <vector>

#include "masr/matrix.hpp"
#include "masr/param_store.hpp"
#include "masr/types.hpp"

namespace masr {

// y = x W^T + b, rows are time steps.
struct Linear {
  std::string prefix;
  int in_dim = 0;
  int out_dim = 0;

  void init(ParamStore& ps, Rng& rng) const;
  Matrix forward(const ParamStore& ps, const Matrix& x) const;
  // Accumulates dW/db into the store and returns dx.
  Matrix backward(ParamStore& ps, const Matrix& x, const Matrix& dy) const;
};

struct Embedding {
  std::string prefix;
  int vocab = 0;
  int dim = 0;

  void init(ParamStore& ps, Rng& rng) const;
  Matrix forward(const ParamStore& ps, const LabelSeq& ids) const;
  void backward(ParamStore& ps, const LabelSeq& ids, const Matrix& dy) const;
};

// Gated recurrent cell with explicit memory; gate order i, f, g, o.
// Parameters: Wx (4H x I), Wh (4H x H), b (1 x 4H).
struct LstmCell {
  std::string prefix;
  int in_dim = 0;
  int hidden = 0;

  void init(ParamStore& ps, Rng& rng) const;

  struct Cache {
    Matrix gates;   // T x 4H, post-activation
    Matrix c;       // T x H
    Matrix tanh_c;  // T x H
  };

  // Runs over x rows, right-to-left when reverse is set. Outputs and cache
  // rows are indexed by original time either way.
  Matrix forward(const ParamStore& ps, const Matrix& x, bool reverse, Cache* cache) const;

  // dh is the gradient on the cell outputs. Accumulates parameter gradients
  // and returns dx.
  Matrix backward(ParamStore& ps, const Matrix& x, const Cache& cache, const Matrix& dh,
                  bool reverse) const;

  // One step for autoregressive decoding; h and c are carried state.
  void step(const ParamStore& ps, const double* x, std::vector<double>& h,
            std::vector<double>& c) const;
};

// Multi-layer (optionally bidirectional) recurrent encoder. A bidirectional
// layer concatenates the forward and backward cell outputs, so its output
// width is 2 x hidden and the output length always equals the input length.
struct RecurrentStack {
  std::string prefix;
  int in_dim = 0;
  int hidden = 0;
  int layers = 1;
  bool bidirectional = true;

  int out_dim() const { return bidirectional ? 2 * hidden : hidden; }
  int layer_in_dim(int layer) const { return layer == 0 ? in_dim : out_dim(); }

  void init(ParamStore& ps, Rng& rng) const;

  struct Cache {
    std::vector<Matrix> layer_inputs;           // input of each layer
    std::vector<LstmCell::Cache> cell_caches;   // fwd (and bwd) per layer
  };

  // Throws DataError on empty input.
  Matrix forward(const ParamStore& ps, const Matrix& x, Cache* cache) const;
  Matrix backward(ParamStore& ps, const Cache& cache, const Matrix& dout) const;

  // Stepwise interface, unidirectional stacks only.
  struct StepState {
    std::vector<std::vector<double>> h, c;  // per layer
  };
  StepState zero_state() const;
  std::vector<double> step(const ParamStore& ps, const std::vector<double>& x,
                           StepState& state) const;

 private:
  LstmCell cell(int layer, bool backward_dir) const;
};

// Additive (single hidden layer) attention: score = v . tanh(Wq q + Wk k).
// Weights are a softmax over scores; the context is the weighted sum of the
// encoder states.
struct AdditiveAttention {
  std::string prefix;
  int query_dim = 0;
  int key_dim = 0;
  int attn_dim = 0;

  void init(ParamStore& ps, Rng& rng) const;

  // states . Wk^T, computed once per sequence and reused across steps.
  Matrix project_keys(const ParamStore& ps, const Matrix& states) const;

  struct StepCache {
    std::vector<double> weights;
    Matrix u;  // T x A, tanh of the score pre-activation
  };

  void forward_step(const ParamStore& ps, const Matrix& states, const Matrix& keys_proj,
                    const double* query, StepCache* cache, std::vector<double>* context) const;

  // Accumulates dWq/dv; adds contributions to dquery, dstates, and dkeys_proj.
  void backward_step(ParamStore& ps, const Matrix& states, const Matrix& keys_proj,
                     const double* query, const StepCache& cache,
                     const std::vector<double>& dcontext, double* dquery, Matrix& dstates,
                     Matrix& dkeys_proj) const;

  // Folds the accumulated dkeys_proj back into dstates and dWk.
  void backward_keys(ParamStore& ps, const Matrix& states, const Matrix& dkeys_proj,
                     Matrix& dstates) const;
};

// Convenience single-shot attention (context, weights) for one query.
std::pair<std::vector<double>, std::vector<double>> attend(const ParamStore& ps,
                                                           const AdditiveAttention& attn,
                                                           const Matrix& states,
                                                           const std::vector<double>& query);

}  // namespace masr

#endif  // MASR_NN_HPP_
