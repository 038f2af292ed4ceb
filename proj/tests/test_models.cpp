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
#include <filesystem>

#include "masr/checkpoint.hpp"
#include "masr/ctc.hpp"
#include "masr/error.hpp"
#include "masr/eval.hpp"
#include "masr/lexicon.hpp"
#include "masr/nets.hpp"
#include "masr/rng.hpp"

using namespace masr;

namespace {

Vocabulary phone_vocab(int n) {
  std::vector<std::string> units;
  for (int i = 0; i < n; ++i) units.push_back("p" + std::to_string(i));
  return Vocabulary::from_units(units);
}

Vocabulary word_vocab_n(int n) {
  std::vector<std::string> units;
  for (int i = 0; i < n; ++i) units.push_back("w" + std::to_string(i));
  return Vocabulary::from_units(units);
}

// Synthetic features for a phoneme sequence: indicator rows plus noise,
// a few frames per phoneme.
Matrix phones_to_feats(const LabelSeq& phones, int feat_dim, Rng& rng, double sigma = 0.2) {
  std::vector<std::pair<int, int>> frames;  // (phone, copies)
  int total = 0;
  for (int32_t p : phones) {
    const int copies = 2 + static_cast<int>(rng.uniform_int(3));
    frames.push_back({p, copies});
    total += copies;
  }
  Matrix feats(total, feat_dim);
  int t = 0;
  for (auto [p, copies] : frames) {
    for (int c = 0; c < copies; ++c, ++t) {
      for (int j = 0; j < feat_dim; ++j) {
        const int unit = p - Vocabulary::kNumReserved;  // indicator basis skips reserved
        feats(t, j) = (j == unit ? 1.0 : 0.0) + sigma * rng.normal();
      }
    }
  }
  return feats;
}

}  // namespace

TEST_CASE("a2p forward emits normalized posteriors with one row per frame") {
  Vocabulary pv = phone_vocab(5);
  A2pModel m = A2pModel::create(4, pv, {1, 8, true}, 1);
  Rng rng(2);
  Matrix feats(6, 4);
  for (double& v : feats.data) v = rng.uniform(-1.0, 1.0);
  Matrix post = m.forward(feats);
  CHECK(post.rows == 6);
  CHECK(post.cols == pv.size());
  for (int t = 0; t < post.rows; ++t) {
    CHECK(std::fabs(logsumexp(post.row_span(t))) < 1e-9);
  }
}

TEST_CASE("a2p memorizes a single utterance") {
  Vocabulary pv = phone_vocab(4);
  A2pModel m = A2pModel::create(4, pv, {1, 16, true}, 3);
  Rng rng(4);
  const LabelSeq target = {4, 6, 5, 7};  // reserved offset is 4
  Matrix feats = phones_to_feats(target, 4, rng, 0.05);

  double first = 0.0, last = 0.0;
  for (int step = 0; step < 150; ++step) {
    const double loss = m.train_utterance(feats, target);
    if (step == 0) first = loss;
    last = loss;
    sgd_step(m.params, 0.2);
  }
  CHECK(last < first);
  CHECK(greedy_decode(m.forward(feats)) == target);
}

TEST_CASE("a2p end-to-end gradient check") {
  Vocabulary pv = phone_vocab(3);
  A2pModel m = A2pModel::create(3, pv, {1, 5, true}, 5);
  Rng rng(6);
  for (auto& e : m.params.entries())
    for (double& v : e.value.data) v = rng.uniform(-0.8, 0.8);
  Matrix feats(5, 3);
  for (double& v : feats.data) v = rng.uniform(-1.0, 1.0);
  const LabelSeq target = {4, 5};
  auto loss = [&](bool with_grad) {
    if (with_grad) return m.train_utterance(feats, target);
    return ctc_loss(m.forward(feats), target);
  };
  CHECK(grad_check(m.params, loss, 1e-5) < 1e-4);
}

TEST_CASE("p2w ctc end-to-end gradient check on one-hot input") {
  Vocabulary pv = phone_vocab(4);
  Vocabulary wv = word_vocab_n(5);
  P2wCtcModel m = P2wCtcModel::create(pv, wv, {1, 6, true}, 7);
  Rng rng(8);
  for (auto& e : m.params.entries())
    for (double& v : e.value.data) v = rng.uniform(-0.8, 0.8);
  Matrix oh = one_hot_posteriors({4, 6, 5, 7, 4}, pv.size());
  const LabelSeq words = {4, 6};
  auto loss = [&](bool with_grad) {
    if (with_grad) return m.train_utterance(oh, words);
    return ctc_loss(m.forward(oh), words);
  };
  CHECK(grad_check(m.params, loss, 1e-5) < 1e-4);
}

TEST_CASE("s2s with zero parameters has the uniform-distribution loss") {
  Vocabulary pv = phone_vocab(4);
  Vocabulary wv = word_vocab_n(6);  // K = 10 with reserved
  P2wS2sModel m = P2wS2sModel::create(pv, wv, {1, 5, 1, 5, 3, 4}, 8);
  for (auto& e : m.params.entries()) e.value.fill(0.0);
  Matrix oh = one_hot_posteriors({4, 5, 6}, pv.size());
  const LabelSeq words = {4, 7};  // N = 2
  const double expected = 3.0 * std::log(static_cast<double>(wv.size()));
  CHECK(m.loss(oh, words) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("s2s loss equals the sum of per-step cross-entropies") {
  Vocabulary pv = phone_vocab(4);
  Vocabulary wv = word_vocab_n(6);
  P2wS2sModel m = P2wS2sModel::create(pv, wv, {1, 5, 1, 5, 3, 4}, 9);
  Matrix oh = one_hot_posteriors({4, 5, 6, 4}, pv.size());
  const LabelSeq words = {4, 7, 5};
  const double full = m.loss(oh, words);
  const std::vector<double> steps = m.per_step_nll(oh, words);
  CHECK(steps.size() == words.size() + 1);  // + eos
  double sum = 0.0;
  for (double s : steps) {
    CHECK(s >= 0.0);
    sum += s;
  }
  CHECK(sum == doctest::Approx(full).epsilon(1e-10));
}

TEST_CASE("s2s rejects reserved units in the target") {
  Vocabulary pv = phone_vocab(3);
  Vocabulary wv = word_vocab_n(3);
  P2wS2sModel m = P2wS2sModel::create(pv, wv, {1, 4, 1, 4, 3, 3}, 10);
  Matrix oh = one_hot_posteriors({4}, pv.size());
  CHECK_THROWS_AS(m.loss(oh, {Vocabulary::kBlank}), DataError);
  CHECK_THROWS_AS(m.loss(oh, {}), DataError);
}

TEST_CASE("s2s end-to-end gradient check") {
  Vocabulary pv = phone_vocab(3);
  Vocabulary wv = word_vocab_n(4);
  P2wS2sModel m = P2wS2sModel::create(pv, wv, {1, 4, 1, 4, 3, 4}, 11);
  Rng rng(12);
  for (auto& e : m.params.entries())
    for (double& v : e.value.data) v = rng.uniform(-0.8, 0.8);
  Matrix oh = one_hot_posteriors({4, 6, 5, 4}, pv.size());
  const LabelSeq words = {5, 4, 6};
  auto loss = [&](bool with_grad) {
    if (with_grad) return m.train_pair(oh, words);
    return m.loss(oh, words);
  };
  CHECK(grad_check(m.params, loss, 1e-5) < 1e-4);
}

TEST_CASE("s2s multimodal second-encoder gradient check") {
  Vocabulary pv = phone_vocab(3);
  Vocabulary wv = word_vocab_n(4);
  P2wS2sModel m = P2wS2sModel::create(pv, wv, {1, 4, 1, 4, 3, 4}, 12, /*multimodal=*/true);
  Rng rng(13);
  for (auto& e : m.params.entries())
    for (double& v : e.value.data) v = rng.uniform(-0.8, 0.8);
  Matrix oh = one_hot_posteriors({4, 6, 5}, pv.size());
  const LabelSeq words = {5, 6};
  auto loss = [&](bool with_grad) {
    if (with_grad) return m.train_pair(oh, words, /*second_encoder=*/true);
    return m.loss(oh, words, /*second_encoder=*/true);
  };
  CHECK(grad_check(m.params, loss, 1e-5) < 1e-4);
}

TEST_CASE("s2s memorizes one pair and decodes it back") {
  Vocabulary pv = phone_vocab(5);
  Vocabulary wv = word_vocab_n(6);
  P2wS2sModel m = P2wS2sModel::create(pv, wv, {1, 12, 1, 12, 6, 8}, 13);
  Matrix oh = one_hot_posteriors({4, 7, 5, 8, 6}, pv.size());
  const LabelSeq words = {4, 8, 5};

  double first = 0.0, last = 0.0;
  for (int step = 0; step < 200; ++step) {
    const double loss = m.train_pair(oh, words);
    if (step == 0) first = loss;
    last = loss;
    sgd_step(m.params, 0.3);
  }
  CHECK(last < first);
  CHECK(m.decode(oh, 10) == words);
  // decode is deterministic for a fixed checkpoint
  CHECK(m.decode(oh, 10) == m.decode(oh, 10));
  // the length cap binds
  CHECK(m.decode(oh, 1).size() <= 1);
  CHECK_THROWS_AS(m.decode(oh, 0), DataError);
}

TEST_CASE("p2w wrapper rejects the second encoder for ctc") {
  Vocabulary pv = phone_vocab(3);
  Vocabulary wv = word_vocab_n(3);
  P2wModel m = make_p2w(P2wVariant::kCtc, pv, wv, {1, 4, true}, {}, 14);
  Matrix oh = one_hot_posteriors({4, 5}, pv.size());
  CHECK_THROWS_AS(m.train_utterance(oh, {4}, /*second_encoder=*/true),
                  UnsupportedStrategyError);
}

TEST_CASE("ctc output-layer surgery preserves old logits") {
  Vocabulary pv = phone_vocab(4);
  Vocabulary wv = word_vocab_n(4);
  P2wCtcModel m = P2wCtcModel::create(pv, wv, {1, 6, true}, 15);
  Matrix oh = one_hot_posteriors({4, 6, 5}, pv.size());

  Matrix hidden_before = m.stack.forward(m.params, Matrix(oh.rows, oh.cols, 0.0), nullptr);
  Matrix logits_before = m.proj.forward(m.params, hidden_before);

  Vocabulary extended = wv;
  extended.add("wx");
  extended.add("wy");
  m.extend_words(extended, 99);

  CHECK(m.word_vocab.size() == wv.size() + 2);
  Matrix hidden_after = m.stack.forward(m.params, Matrix(oh.rows, oh.cols, 0.0), nullptr);
  Matrix logits_after = m.proj.forward(m.params, hidden_after);
  CHECK(logits_after.cols == logits_before.cols + 2);
  for (int t = 0; t < logits_before.rows; ++t) {
    for (int j = 0; j < logits_before.cols; ++j) {
      CHECK(logits_after(t, j) == logits_before(t, j));
    }
  }
  // shrinking or reindexing is rejected
  CHECK_THROWS_AS(m.extend_words(wv, 1), DataError);
}

TEST_CASE("s2s surgery extends embedding and output rows") {
  Vocabulary pv = phone_vocab(3);
  Vocabulary wv = word_vocab_n(3);
  P2wS2sModel m = P2wS2sModel::create(pv, wv, {1, 4, 1, 4, 3, 4}, 16);
  const Matrix emb_before = m.params.value("emb.E");
  const Matrix projw_before = m.params.value("proj.W");

  Vocabulary extended = wv;
  extended.add("new1");
  m.extend_words(extended, 21);
  const Matrix& emb_after = m.params.value("emb.E");
  const Matrix& projw_after = m.params.value("proj.W");
  CHECK(emb_after.rows == emb_before.rows + 1);
  CHECK(projw_after.rows == projw_before.rows + 1);
  for (int r = 0; r < emb_before.rows; ++r)
    for (int c = 0; c < emb_before.cols; ++c) CHECK(emb_after(r, c) == emb_before(r, c));
  for (int r = 0; r < projw_before.rows; ++r)
    for (int c = 0; c < projw_before.cols; ++c)
      CHECK(projw_after(r, c) == projw_before(r, c));
}

TEST_CASE("a2p checkpoint round trip is exact") {
  Vocabulary pv = phone_vocab(5);
  A2pModel m = A2pModel::create(6, pv, {2, 7, true}, 17);
  CheckpointMeta meta;
  meta.stage = StageTag::kA2p;
  meta.psd = {8.0, 1};
  meta.seed = 17;
  meta.config_hash = "deadbeef";
  const std::string path = "a2p_roundtrip.ckpt";
  save_a2p_checkpoint(path, m, meta);

  CheckpointMeta got;
  A2pModel loaded = load_a2p_checkpoint(path, &got);
  CHECK(got.stage == StageTag::kA2p);
  CHECK(got.psd.lambda == 8.0);
  CHECK(got.seed == 17);
  CHECK(got.config_hash == "deadbeef");
  CHECK(loaded.phoneme_vocab == m.phoneme_vocab);
  REQUIRE(loaded.params.entries().size() == m.params.entries().size());
  for (size_t i = 0; i < m.params.entries().size(); ++i) {
    CHECK(loaded.params.entries()[i].name == m.params.entries()[i].name);
    CHECK(loaded.params.entries()[i].value.data == m.params.entries()[i].value.data);
  }
  CHECK(checkpoint_kind(path) == "a2p");
  std::filesystem::remove(path);
}

TEST_CASE("p2w checkpoint round trip for both variants") {
  Vocabulary pv = phone_vocab(4);
  Vocabulary wv = word_vocab_n(5);
  for (P2wVariant variant : {P2wVariant::kCtc, P2wVariant::kS2s}) {
    P2wModel m = make_p2w(variant, pv, wv, {1, 6, true}, {1, 5, 1, 5, 3, 4}, 18);
    CheckpointMeta meta;
    meta.stage = StageTag::kP2wTdi;
    meta.psd = {3.0, 1};
    meta.seed = 18;
    meta.config_hash = "cafe";
    const std::string path = "p2w_roundtrip.ckpt";
    save_p2w_checkpoint(path, m, meta);
    CheckpointMeta got;
    P2wModel loaded = load_p2w_checkpoint(path, &got);
    CHECK(loaded.variant == variant);
    CHECK(got.stage == StageTag::kP2wTdi);
    CHECK(loaded.word_vocab() == wv);
    REQUIRE(loaded.params().entries().size() == m.params().entries().size());
    for (size_t i = 0; i < m.params().entries().size(); ++i) {
      CHECK(loaded.params().entries()[i].value.data == m.params().entries()[i].value.data);
    }
    CHECK(checkpoint_kind(path) == "p2w");
    std::filesystem::remove(path);
  }
}

TEST_CASE("multimodal and extended models survive the round trip") {
  Vocabulary pv = phone_vocab(3);
  Vocabulary wv = word_vocab_n(3);
  P2wModel m = make_p2w(P2wVariant::kS2s, pv, wv, {}, {1, 4, 1, 4, 3, 4}, 19);
  m.s2s->add_second_encoder(20);
  Vocabulary ext = wv;
  ext.add("extra");
  m.extend_words(ext, 21);

  CheckpointMeta meta;
  meta.stage = StageTag::kP2wOovExtended;
  const std::string path = "p2w_mm.ckpt";
  save_p2w_checkpoint(path, m, meta);
  P2wModel loaded = load_p2w_checkpoint(path);
  CHECK(loaded.s2s->multimodal);
  CHECK(loaded.word_vocab().contains("extra"));
  CHECK(loaded.params().total_size() == m.params().total_size());
  std::filesystem::remove(path);
}

TEST_CASE("loading a p2w file as a2p fails cleanly") {
  Vocabulary pv = phone_vocab(3);
  Vocabulary wv = word_vocab_n(3);
  P2wModel m = make_p2w(P2wVariant::kCtc, pv, wv, {1, 4, true}, {}, 22);
  const std::string path = "p2w_wrongkind.ckpt";
  save_p2w_checkpoint(path, m, {});
  CHECK_THROWS_AS(load_a2p_checkpoint(path), DataError);
  std::filesystem::remove(path);
}

TEST_CASE("stage tags round trip through strings") {
  for (StageTag s : {StageTag::kA2p, StageTag::kP2wFresh, StageTag::kP2wTdi,
                     StageTag::kP2wFinetuned, StageTag::kP2wOovExtended}) {
    CHECK(stage_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(stage_from_string("bogus"), DataError);
}
