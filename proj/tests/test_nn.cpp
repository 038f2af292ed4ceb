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
#include "masr/nn.hpp"
#include "masr/rng.hpp"

using namespace masr;

namespace {

Matrix random_matrix(int r, int c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(lo, hi);
  return m;
}

double weighted_sum(const Matrix& out, const Matrix& weights) {
  REQUIRE(out.same_shape(weights));
  double s = 0.0;
  for (size_t i = 0; i < out.data.size(); ++i) s += out.data[i] * weights.data[i];
  return s;
}

}  // namespace

TEST_CASE("linear layer gradients") {
  Rng rng(1);
  ParamStore ps;
  Linear lin{"lin.", 4, 3};
  lin.init(ps, rng);
  Matrix& x = ps.add("x", 5, 4);
  for (double& v : x.data) v = rng.uniform(-1.0, 1.0);
  const Matrix r = random_matrix(5, 3, rng);

  auto loss = [&](bool with_grad) {
    Matrix out = lin.forward(ps, ps.value("x"));
    if (with_grad) {
      Matrix dx = lin.backward(ps, ps.value("x"), r);
      axpy(1.0, dx, ps.grad("x"));
    }
    return weighted_sum(out, r);
  };
  CHECK(grad_check(ps, loss, 1e-5) < 1e-6);
}

TEST_CASE("embedding lookup and gradient accumulation") {
  Rng rng(2);
  ParamStore ps;
  Embedding emb{"emb.", 6, 3};
  emb.init(ps, rng);
  const LabelSeq ids = {1, 4, 1};
  const Matrix r = random_matrix(3, 3, rng);
  auto loss = [&](bool with_grad) {
    Matrix out = emb.forward(ps, ids);
    if (with_grad) emb.backward(ps, ids, r);
    return weighted_sum(out, r);
  };
  CHECK(grad_check(ps, loss, 1e-5) < 1e-6);
  CHECK_THROWS_AS(emb.forward(ps, {9}), DataError);
}

TEST_CASE("lstm cell gradients through ten steps") {
  Rng rng(3);
  for (bool reverse : {false, true}) {
    ParamStore ps;
    LstmCell cell{"cell.", 3, 4};
    cell.init(ps, rng);
    Matrix& x = ps.add("x", 10, 3);
    for (double& v : x.data) v = rng.uniform(-1.0, 1.0);
    const Matrix r = random_matrix(10, 4, rng);

    auto loss = [&](bool with_grad) {
      LstmCell::Cache cache;
      Matrix out = cell.forward(ps, ps.value("x"), reverse, &cache);
      if (with_grad) {
        Matrix dx = cell.backward(ps, ps.value("x"), cache, r, reverse);
        axpy(1.0, dx, ps.grad("x"));
      }
      return weighted_sum(out, r);
    };
    CHECK(grad_check(ps, loss, 1e-5) < 1e-4);
  }
}

TEST_CASE("reversed cell equals forward cell on the reversed sequence") {
  Rng rng(4);
  ParamStore ps;
  LstmCell cell{"cell.", 3, 5};
  cell.init(ps, rng);
  Matrix x = random_matrix(7, 3, rng);
  Matrix xr(7, 3);
  for (int t = 0; t < 7; ++t)
    for (int j = 0; j < 3; ++j) xr(t, j) = x(6 - t, j);

  Matrix out_rev = cell.forward(ps, x, true, nullptr);
  Matrix out_fwd_on_reversed = cell.forward(ps, xr, false, nullptr);
  for (int t = 0; t < 7; ++t)
    for (int j = 0; j < 5; ++j)
      CHECK(out_rev(t, j) == doctest::Approx(out_fwd_on_reversed(6 - t, j)).epsilon(1e-12));
}

TEST_CASE("stepwise cell agrees with the batched forward") {
  Rng rng(5);
  ParamStore ps;
  LstmCell cell{"cell.", 4, 6};
  cell.init(ps, rng);
  Matrix x = random_matrix(9, 4, rng);
  Matrix out = cell.forward(ps, x, false, nullptr);
  std::vector<double> h(6, 0.0), c(6, 0.0);
  for (int t = 0; t < 9; ++t) {
    cell.step(ps, x.row(t), h, c);
    for (int j = 0; j < 6; ++j) CHECK(h[j] == doctest::Approx(out(t, j)).epsilon(1e-12));
  }
}

TEST_CASE("bidirectional stack output width and length") {
  Rng rng(6);
  ParamStore ps;
  RecurrentStack stack{"enc.", 3, 4, 2, true};
  stack.init(ps, rng);
  Matrix x = random_matrix(5, 3, rng);
  Matrix out = stack.forward(ps, x, nullptr);
  CHECK(out.rows == 5);
  CHECK(out.cols == 8);

  Matrix one = random_matrix(1, 3, rng);
  CHECK(stack.forward(ps, one, nullptr).rows == 1);

  Matrix empty(0, 3);
  CHECK_THROWS_AS(stack.forward(ps, empty, nullptr), DataError);
}

TEST_CASE("zero parameters and zero input give zero states") {
  ParamStore ps;
  RecurrentStack stack{"enc.", 3, 4, 1, true};
  Rng rng(7);
  stack.init(ps, rng);
  for (auto& e : ps.entries()) e.value.fill(0.0);
  Matrix x(6, 3);  // zeros
  Matrix out = stack.forward(ps, x, nullptr);
  for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("reversing the input of a tied bidirectional stack permutes the halves") {
  Rng rng(8);
  ParamStore ps;
  RecurrentStack stack{"enc.", 3, 4, 1, true};
  stack.init(ps, rng);
  // tie the two directions' parameters
  ps.value("enc.l0.bwd.Wx") = ps.value("enc.l0.fwd.Wx");
  ps.value("enc.l0.bwd.Wh") = ps.value("enc.l0.fwd.Wh");
  ps.value("enc.l0.bwd.b") = ps.value("enc.l0.fwd.b");

  Matrix x = random_matrix(6, 3, rng);
  Matrix xr(6, 3);
  for (int t = 0; t < 6; ++t)
    for (int j = 0; j < 3; ++j) xr(t, j) = x(5 - t, j);

  Matrix out = stack.forward(ps, x, nullptr);
  Matrix out_r = stack.forward(ps, xr, nullptr);
  // out_r[t] = halves of out[T-1-t], swapped
  for (int t = 0; t < 6; ++t) {
    for (int j = 0; j < 4; ++j) {
      CHECK(out_r(t, j) == doctest::Approx(out(5 - t, 4 + j)).epsilon(1e-12));
      CHECK(out_r(t, 4 + j) == doctest::Approx(out(5 - t, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("two-layer bidirectional stack gradients") {
  Rng rng(9);
  ParamStore ps;
  RecurrentStack stack{"enc.", 3, 3, 2, true};
  stack.init(ps, rng);
  Matrix& x = ps.add("x", 6, 3);
  for (double& v : x.data) v = rng.uniform(-1.0, 1.0);
  const Matrix r = random_matrix(6, 6, rng);

  auto loss = [&](bool with_grad) {
    RecurrentStack::Cache cache;
    Matrix out = stack.forward(ps, ps.value("x"), &cache);
    if (with_grad) {
      Matrix dx = stack.backward(ps, cache, r);
      axpy(1.0, dx, ps.grad("x"));
    }
    return weighted_sum(out, r);
  };
  CHECK(grad_check(ps, loss, 1e-5) < 1e-4);
}

TEST_CASE("unidirectional stack stepwise matches batch forward") {
  Rng rng(10);
  ParamStore ps;
  RecurrentStack stack{"dec.", 3, 5, 2, false};
  stack.init(ps, rng);
  Matrix x = random_matrix(7, 3, rng);
  Matrix out = stack.forward(ps, x, nullptr);
  auto state = stack.zero_state();
  for (int t = 0; t < 7; ++t) {
    std::vector<double> xt(x.row(t), x.row(t) + 3);
    std::vector<double> h = stack.step(ps, xt, state);
    for (int j = 0; j < 5; ++j) CHECK(h[j] == doctest::Approx(out(t, j)).epsilon(1e-12));
  }
  RecurrentStack bi{"bi.", 3, 5, 1, true};
  bi.init(ps, rng);
  auto s = bi.zero_state();
  CHECK_THROWS_AS(bi.step(ps, std::vector<double>(3, 0.0), s), DataError);
}

TEST_CASE("attention weights on a single state are forced to one") {
  Rng rng(11);
  ParamStore ps;
  AdditiveAttention attn{"attn.", 4, 3, 5};
  attn.init(ps, rng);
  Matrix states = random_matrix(1, 3, rng);
  std::vector<double> q(4, 0.3);
  auto [ctx, w] = attend(ps, attn, states, q);
  CHECK(w.size() == 1);
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (int k = 0; k < 3; ++k) CHECK(ctx[k] == doctest::Approx(states(0, k)).epsilon(1e-12));
}

TEST_CASE("identical states get uniform attention") {
  Rng rng(12);
  ParamStore ps;
  AdditiveAttention attn{"attn.", 4, 3, 5};
  attn.init(ps, rng);
  Matrix states(6, 3);
  for (int t = 0; t < 6; ++t)
    for (int j = 0; j < 3; ++j) states(t, j) = 0.7 - 0.2 * j;
  std::vector<double> q = {0.1, -0.4, 0.2, 0.9};
  auto [ctx, w] = attend(ps, attn, states, q);
  for (double wi : w) CHECK(wi == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("attention weights form a distribution and the context matches an oracle") {
  Rng rng(13);
  ParamStore ps;
  AdditiveAttention attn{"attn.", 4, 3, 5};
  attn.init(ps, rng);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix states = random_matrix(5, 3, rng);
    std::vector<double> q(4);
    for (double& v : q) v = rng.uniform(-1.0, 1.0);
    auto [ctx, w] = attend(ps, attn, states, q);
    double sum = 0.0;
    for (double wi : w) {
      CHECK(wi >= 0.0);
      sum += wi;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) {
      double expect = 0.0;
      for (int t = 0; t < 5; ++t) expect += w[t] * states(t, k);
      CHECK(ctx[k] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("attention gradients for parameters, query, and states") {
  Rng rng(14);
  ParamStore ps;
  AdditiveAttention attn{"attn.", 4, 3, 5};
  attn.init(ps, rng);
  Matrix& states = ps.add("states", 6, 3);
  for (double& v : states.data) v = rng.uniform(-1.0, 1.0);
  Matrix& query = ps.add("query", 1, 4);
  for (double& v : query.data) v = rng.uniform(-1.0, 1.0);
  std::vector<double> r(3);
  for (double& v : r) v = rng.uniform(-1.0, 1.0);

  auto loss = [&](bool with_grad) {
    const Matrix& st = ps.value("states");
    Matrix keys = attn.project_keys(ps, st);
    AdditiveAttention::StepCache cache;
    std::vector<double> ctx;
    attn.forward_step(ps, st, keys, ps.value("query").row(0), &cache, &ctx);
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += r[k] * ctx[k];
    if (with_grad) {
      Matrix dstates(6, 3), dkeys(6, 5);
      attn.backward_step(ps, st, keys, ps.value("query").row(0), cache, r,
                         ps.grad("query").row(0), dstates, dkeys);
      attn.backward_keys(ps, st, dkeys, dstates);
      axpy(1.0, dstates, ps.grad("states"));
    }
    return s;
  };
  CHECK(grad_check(ps, loss, 1e-5) < 1e-4);
}
