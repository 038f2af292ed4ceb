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

#include "masr/nn.hpp"

#include <cmath>
#include <cstring>

#include "masr/error.hpp"

namespace masr {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

// ---------------------------------------------------------------------------
// Linear

void Linear::init(ParamStore& ps, Rng& rng) const {
  ps.add_uniform(prefix + "W", out_dim, in_dim, in_dim, rng);
  ps.add(prefix + "b", 1, out_dim);
}

Matrix Linear::forward(const ParamStore& ps, const Matrix& x) const {
  Matrix y = matmul_a_bt(x, ps.value(prefix + "W"));
  const Matrix& b = ps.value(prefix + "b");
  for (int t = 0; t < y.rows; ++t) {
    double* row = y.row(t);
    for (int j = 0; j < y.cols; ++j) row[j] += b(0, j);
  }
  return y;
}

Matrix Linear::backward(ParamStore& ps, const Matrix& x, const Matrix& dy) const {
  matmul_at_b_acc(dy, x, ps.grad(prefix + "W"));
  Matrix& db = ps.grad(prefix + "b");
  for (int t = 0; t < dy.rows; ++t) {
    const double* row = dy.row(t);
    for (int j = 0; j < dy.cols; ++j) db(0, j) += row[j];
  }
  return matmul(dy, ps.value(prefix + "W"));
}

// ---------------------------------------------------------------------------
// Embedding

void Embedding::init(ParamStore& ps, Rng& rng) const {
  ps.add_uniform(prefix + "E", vocab, dim, dim, rng);
}

Matrix Embedding::forward(const ParamStore& ps, const LabelSeq& ids) const {
  const Matrix& e = ps.value(prefix + "E");
  Matrix out(static_cast<int>(ids.size()), dim);
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= vocab) throw DataError("embedding: id out of range");
    std::memcpy(out.row(static_cast<int>(i)), e.row(ids[i]), sizeof(double) * dim);
  }
  return out;
}

void Embedding::backward(ParamStore& ps, const LabelSeq& ids, const Matrix& dy) const {
  Matrix& de = ps.grad(prefix + "E");
  for (size_t i = 0; i < ids.size(); ++i) {
    const double* src = dy.row(static_cast<int>(i));
    double* dst = de.row(ids[i]);
    for (int j = 0; j < dim; ++j) dst[j] += src[j];
  }
}

// ---------------------------------------------------------------------------
// LstmCell

void LstmCell::init(ParamStore& ps, Rng& rng) const {
  ps.add_uniform(prefix + "Wx", 4 * hidden, in_dim, in_dim, rng);
  ps.add_uniform(prefix + "Wh", 4 * hidden, hidden, hidden, rng);
  ps.add(prefix + "b", 1, 4 * hidden);
}

Matrix LstmCell::forward(const ParamStore& ps, const Matrix& x, bool reverse,
                         Cache* cache) const {
  const Matrix& wx = ps.value(prefix + "Wx");
  const Matrix& wh = ps.value(prefix + "Wh");
  const Matrix& b = ps.value(prefix + "b");
  const int T = x.rows;
  const int H = hidden;

  // Input projection for the whole sequence in one product.
  Matrix zx = matmul_a_bt(x, wx);  // T x 4H

  Matrix h(T, H);
  if (cache) {
    cache->gates = Matrix(T, 4 * H);
    cache->c = Matrix(T, H);
    cache->tanh_c = Matrix(T, H);
  }

  std::vector<double> h_prev(H, 0.0), c_prev(H, 0.0), z(4 * H);
  for (int step = 0; step < T; ++step) {
    const int t = reverse ? T - 1 - step : step;
    const double* zx_row = zx.row(t);
    for (int j = 0; j < 4 * H; ++j) {
      const double* wrow = wh.row(j);
      double acc = zx_row[j] + b(0, j);
      for (int k = 0; k < H; ++k) acc += wrow[k] * h_prev[k];
      z[j] = acc;
    }
    double* h_row = h.row(t);
    for (int k = 0; k < H; ++k) {
      const double gi = sigmoid(z[k]);
      const double gf = sigmoid(z[H + k]);
      const double gg = std::tanh(z[2 * H + k]);
      const double go = sigmoid(z[3 * H + k]);
      const double c_t = gf * c_prev[k] + gi * gg;
      const double tc = std::tanh(c_t);
      h_row[k] = go * tc;
      c_prev[k] = c_t;
      if (cache) {
        double* grow = cache->gates.row(t);
        grow[k] = gi;
        grow[H + k] = gf;
        grow[2 * H + k] = gg;
        grow[3 * H + k] = go;
        cache->c(t, k) = c_t;
        cache->tanh_c(t, k) = tc;
      }
    }
    std::memcpy(h_prev.data(), h_row, sizeof(double) * H);
  }
  return h;
}

Matrix LstmCell::backward(ParamStore& ps, const Matrix& x, const Cache& cache,
                          const Matrix& dh, bool reverse) const {
  const Matrix& wx = ps.value(prefix + "Wx");
  const Matrix& wh = ps.value(prefix + "Wh");
  const int T = x.rows;
  const int H = hidden;

  Matrix dz_all(T, 4 * H);
  // Inputs to the recurrent product at each time index (h_{prev}), needed for
  // the dWh accumulation below.
  Matrix h_prev_all(T, H);
  for (int step = 0; step < T; ++step) {
    const int t = reverse ? T - 1 - step : step;
    if (step > 0) {
      const int tp = reverse ? t + 1 : t - 1;
      // h rows are reconstructed from the cache: h = o * tanh(c)
      for (int k = 0; k < H; ++k) {
        h_prev_all(t, k) = cache.gates(tp, 3 * H + k) * cache.tanh_c(tp, k);
      }
    }
  }

  std::vector<double> dh_carry(H, 0.0), dc_carry(H, 0.0);
  for (int step = T - 1; step >= 0; --step) {
    const int t = reverse ? T - 1 - step : step;
    const double* grow = cache.gates.row(t);
    const double* dh_row = dh.row(t);
    double* dz = dz_all.row(t);
    const bool has_prev = step > 0;
    const int tp = reverse ? t + 1 : t - 1;
    for (int k = 0; k < H; ++k) {
      const double gi = grow[k];
      const double gf = grow[H + k];
      const double gg = grow[2 * H + k];
      const double go = grow[3 * H + k];
      const double tc = cache.tanh_c(t, k);
      const double c_prev = has_prev ? cache.c(tp, k) : 0.0;
      const double dht = dh_row[k] + dh_carry[k];
      double dc = dc_carry[k] + dht * go * (1.0 - tc * tc);
      dz[k] = dc * gg * gi * (1.0 - gi);
      dz[H + k] = dc * c_prev * gf * (1.0 - gf);
      dz[2 * H + k] = dc * gi * (1.0 - gg * gg);
      dz[3 * H + k] = dht * tc * go * (1.0 - go);
      dc_carry[k] = dc * gf;
    }
    // dh_{prev} = Wh^T dz
    std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
    for (int j = 0; j < 4 * H; ++j) {
      const double dzj = dz[j];
      if (dzj == 0.0) continue;
      const double* wrow = wh.row(j);
      for (int k = 0; k < H; ++k) dh_carry[k] += wrow[k] * dzj;
    }
  }

  matmul_at_b_acc(dz_all, x, ps.grad(prefix + "Wx"));
  matmul_at_b_acc(dz_all, h_prev_all, ps.grad(prefix + "Wh"));
  Matrix& db = ps.grad(prefix + "b");
  for (int t = 0; t < T; ++t) {
    const double* dz = dz_all.row(t);
    for (int j = 0; j < 4 * H; ++j) db(0, j) += dz[j];
  }
  return matmul(dz_all, wx);
}

void LstmCell::step(const ParamStore& ps, const double* x, std::vector<double>& h,
                    std::vector<double>& c) const {
  const Matrix& wx = ps.value(prefix + "Wx");
  const Matrix& wh = ps.value(prefix + "Wh");
  const Matrix& b = ps.value(prefix + "b");
  const int H = hidden;
  std::vector<double> z(4 * H);
  for (int j = 0; j < 4 * H; ++j) {
    const double* xrow = wx.row(j);
    const double* hrow = wh.row(j);
    double acc = b(0, j);
    for (int k = 0; k < in_dim; ++k) acc += xrow[k] * x[k];
    for (int k = 0; k < H; ++k) acc += hrow[k] * h[k];
    z[j] = acc;
  }
  for (int k = 0; k < H; ++k) {
    const double gi = sigmoid(z[k]);
    const double gf = sigmoid(z[H + k]);
    const double gg = std::tanh(z[2 * H + k]);
    const double go = sigmoid(z[3 * H + k]);
    c[k] = gf * c[k] + gi * gg;
    h[k] = go * std::tanh(c[k]);
  }
}

// ---------------------------------------------------------------------------
// RecurrentStack

LstmCell RecurrentStack::cell(int layer, bool backward_dir) const {
  LstmCell c;
  c.prefix = prefix + "l" + std::to_string(layer) + (backward_dir ? ".bwd." : ".fwd.");
  c.in_dim = layer_in_dim(layer);
  c.hidden = hidden;
  return c;
}

void RecurrentStack::init(ParamStore& ps, Rng& rng) const {
  for (int l = 0; l < layers; ++l) {
    cell(l, false).init(ps, rng);
    if (bidirectional) cell(l, true).init(ps, rng);
  }
}

Matrix RecurrentStack::forward(const ParamStore& ps, const Matrix& x, Cache* cache) const {
  if (x.rows == 0) throw DataError("recurrent stack: empty input sequence");
  if (x.cols != in_dim) throw DimensionError("recurrent stack: input width mismatch");
  if (cache) {
    cache->layer_inputs.clear();
    cache->cell_caches.clear();
  }
  Matrix cur = x;
  for (int l = 0; l < layers; ++l) {
    if (cache) cache->layer_inputs.push_back(cur);
    LstmCell::Cache fc, bc;
    Matrix fwd = cell(l, false).forward(ps, cur, false, cache ? &fc : nullptr);
    if (cache) cache->cell_caches.push_back(std::move(fc));
    if (bidirectional) {
      Matrix bwd = cell(l, true).forward(ps, cur, true, cache ? &bc : nullptr);
      if (cache) cache->cell_caches.push_back(std::move(bc));
      Matrix cat(cur.rows, 2 * hidden);
      for (int t = 0; t < cur.rows; ++t) {
        std::memcpy(cat.row(t), fwd.row(t), sizeof(double) * hidden);
        std::memcpy(cat.row(t) + hidden, bwd.row(t), sizeof(double) * hidden);
      }
      cur = std::move(cat);
    } else {
      cur = std::move(fwd);
    }
  }
  return cur;
}

Matrix RecurrentStack::backward(ParamStore& ps, const Cache& cache, const Matrix& dout) const {
  Matrix dcur = dout;
  for (int l = layers - 1; l >= 0; --l) {
    const Matrix& input = cache.layer_inputs[l];
    const int ci = bidirectional ? 2 * l : l;
    if (bidirectional) {
      Matrix dfwd(dcur.rows, hidden), dbwd(dcur.rows, hidden);
      for (int t = 0; t < dcur.rows; ++t) {
        std::memcpy(dfwd.row(t), dcur.row(t), sizeof(double) * hidden);
        std::memcpy(dbwd.row(t), dcur.row(t) + hidden, sizeof(double) * hidden);
      }
      Matrix dx = cell(l, false).backward(ps, input, cache.cell_caches[ci], dfwd, false);
      Matrix dx2 = cell(l, true).backward(ps, input, cache.cell_caches[ci + 1], dbwd, true);
      axpy(1.0, dx2, dx);
      dcur = std::move(dx);
    } else {
      dcur = cell(l, false).backward(ps, input, cache.cell_caches[ci], dcur, false);
    }
  }
  return dcur;
}

RecurrentStack::StepState RecurrentStack::zero_state() const {
  StepState s;
  s.h.assign(layers, std::vector<double>(hidden, 0.0));
  s.c.assign(layers, std::vector<double>(hidden, 0.0));
  return s;
}

std::vector<double> RecurrentStack::step(const ParamStore& ps, const std::vector<double>& x,
                                         StepState& state) const {
  if (bidirectional) throw DataError("recurrent stack: stepwise use requires unidirectional");
  std::vector<double> cur = x;
  for (int l = 0; l < layers; ++l) {
    cell(l, false).step(ps, cur.data(), state.h[l], state.c[l]);
    cur = state.h[l];
  }
  return cur;
}

// ---------------------------------------------------------------------------
// AdditiveAttention

void AdditiveAttention::init(ParamStore& ps, Rng& rng) const {
  ps.add_uniform(prefix + "Wq", attn_dim, query_dim, query_dim, rng);
  ps.add_uniform(prefix + "Wk", attn_dim, key_dim, key_dim, rng);
  ps.add_uniform(prefix + "v", 1, attn_dim, attn_dim, rng);
}

Matrix AdditiveAttention::project_keys(const ParamStore& ps, const Matrix& states) const {
  return matmul_a_bt(states, ps.value(prefix + "Wk"));
}

void AdditiveAttention::forward_step(const ParamStore& ps, const Matrix& states,
                                     const Matrix& keys_proj, const double* query,
                                     StepCache* cache, std::vector<double>* context) const {
  if (states.rows < 1) throw DataError("attention: no encoder states");
  const Matrix& wq = ps.value(prefix + "Wq");
  const Matrix& v = ps.value(prefix + "v");
  const int T = states.rows;
  const int A = attn_dim;

  std::vector<double> qproj(A, 0.0);
  for (int j = 0; j < A; ++j) {
    const double* wrow = wq.row(j);
    double acc = 0.0;
    for (int k = 0; k < query_dim; ++k) acc += wrow[k] * query[k];
    qproj[j] = acc;
  }

  Matrix u(T, A);
  std::vector<double> scores(T);
  for (int t = 0; t < T; ++t) {
    const double* krow = keys_proj.row(t);
    double* urow = u.row(t);
    double s = 0.0;
    for (int j = 0; j < A; ++j) {
      urow[j] = std::tanh(qproj[j] + krow[j]);
      s += v(0, j) * urow[j];
    }
    scores[t] = s;
  }

  // softmax over scores
  double mx = scores[0];
  for (double s : scores) mx = std::max(mx, s);
  double sum = 0.0;
  std::vector<double> w(T);
  for (int t = 0; t < T; ++t) {
    w[t] = std::exp(scores[t] - mx);
    sum += w[t];
  }
  for (int t = 0; t < T; ++t) w[t] /= sum;

  context->assign(states.cols, 0.0);
  for (int t = 0; t < T; ++t) {
    const double* srow = states.row(t);
    for (int k = 0; k < states.cols; ++k) (*context)[k] += w[t] * srow[k];
  }
  if (cache) {
    cache->weights = std::move(w);
    cache->u = std::move(u);
  }
}

void AdditiveAttention::backward_step(ParamStore& ps, const Matrix& states,
                                      const Matrix& keys_proj, const double* query,
                                      const StepCache& cache, const std::vector<double>& dctx,
                                      double* dquery, Matrix& dstates,
                                      Matrix& dkeys_proj) const {
  (void)keys_proj;
  const Matrix& wq = ps.value(prefix + "Wq");
  const Matrix& v = ps.value(prefix + "v");
  Matrix& dwq = ps.grad(prefix + "Wq");
  Matrix& dv = ps.grad(prefix + "v");
  const int T = states.rows;
  const int A = attn_dim;
  const int K = states.cols;
  const std::vector<double>& w = cache.weights;

  // context = sum_t w_t states_t
  std::vector<double> dw(T, 0.0);
  for (int t = 0; t < T; ++t) {
    const double* srow = states.row(t);
    double* dsrow = dstates.row(t);
    double acc = 0.0;
    for (int k = 0; k < K; ++k) {
      acc += dctx[k] * srow[k];
      dsrow[k] += w[t] * dctx[k];
    }
    dw[t] = acc;
  }

  // softmax backward
  double dot = 0.0;
  for (int t = 0; t < T; ++t) dot += w[t] * dw[t];
  std::vector<double> dscore(T);
  for (int t = 0; t < T; ++t) dscore[t] = w[t] * (dw[t] - dot);

  // score_t = v . u_t
  std::vector<double> dqproj(A, 0.0);
  for (int t = 0; t < T; ++t) {
    const double ds = dscore[t];
    if (ds == 0.0) continue;
    const double* urow = cache.u.row(t);
    double* dkrow = dkeys_proj.row(t);
    for (int j = 0; j < A; ++j) {
      dv(0, j) += ds * urow[j];
      const double du = ds * v(0, j) * (1.0 - urow[j] * urow[j]);
      dqproj[j] += du;
      dkrow[j] += du;
    }
  }

  for (int j = 0; j < A; ++j) {
    const double dq = dqproj[j];
    if (dq == 0.0) continue;
    double* dwrow = dwq.row(j);
    const double* wrow = wq.row(j);
    for (int k = 0; k < query_dim; ++k) {
      dwrow[k] += dq * query[k];
      dquery[k] += wrow[k] * dq;
    }
  }
}

void AdditiveAttention::backward_keys(ParamStore& ps, const Matrix& states,
                                      const Matrix& dkeys_proj, Matrix& dstates) const {
  matmul_at_b_acc(dkeys_proj, states, ps.grad(prefix + "Wk"));
  matmul_acc(dkeys_proj, ps.value(prefix + "Wk"), dstates);
}

std::pair<std::vector<double>, std::vector<double>> attend(const ParamStore& ps,
                                                           const AdditiveAttention& attn,
                                                           const Matrix& states,
                                                           const std::vector<double>& query) {
  Matrix keys = attn.project_keys(ps, states);
  AdditiveAttention::StepCache cache;
  std::vector<double> ctx;
  attn.forward_step(ps, states, keys, query.data(), &cache, &ctx);
  return {ctx, cache.weights};
}

}  // namespace masr
