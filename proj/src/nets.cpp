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

#include "masr/nets.hpp"

#include <cmath>
#include <cstring>

#include "masr/ctc.hpp"
#include "masr/error.hpp"

namespace masr {

namespace {

Matrix exp_matrix(const Matrix& logp) {
  Matrix out(logp.rows, logp.cols);
  for (size_t i = 0; i < logp.data.size(); ++i) out.data[i] = std::exp(logp.data[i]);
  return out;
}

// Grows a parameter to `rows` rows, copying the existing block and filling the
// new rows uniformly at k = 1/sqrt(fan_in) (zero for fan_in <= 0, used by
// biases). Gradients are re-allocated at the new shape.
void extend_param_rows(ParamStore& ps, const std::string& name, int rows, int fan_in,
                       Rng& rng) {
  const Matrix old = ps.value(name);
  if (rows < old.rows) throw DataError("extend_param_rows: shrinking " + name);
  Matrix grown(rows, old.cols);
  std::memcpy(grown.data.data(), old.data.data(), old.data.size() * sizeof(double));
  if (fan_in > 0) {
    const double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (size_t i = old.data.size(); i < grown.data.size(); ++i)
      grown.data[i] = rng.uniform(-k, k);
  }
  ps.value(name) = std::move(grown);
  ps.grad(name) = Matrix(rows, old.cols);
}

// Grows the 1 x n bias row, new entries zero.
void extend_param_cols(ParamStore& ps, const std::string& name, int cols) {
  const Matrix old = ps.value(name);
  Matrix grown(old.rows, cols);
  for (int r = 0; r < old.rows; ++r)
    std::memcpy(grown.row(r), old.row(r), static_cast<size_t>(old.cols) * sizeof(double));
  ps.value(name) = std::move(grown);
  ps.grad(name) = Matrix(old.rows, cols);
}

}  // namespace

void check_append_only(const Vocabulary& base, const Vocabulary& extended) {
  if (extended.size() < base.size()) {
    throw DataError("vocabulary extension removed units");
  }
  for (int32_t i = 0; i < base.size(); ++i) {
    if (extended.unit(i) != base.unit(i)) {
      throw DataError("vocabulary extension changed index " + std::to_string(i));
    }
  }
}

// ---------------------------------------------------------------------------
// A2pModel

void A2pModel::wire() {
  stack = RecurrentStack{"stack.", feat_dim, arch.hidden, arch.layers, arch.bidirectional};
  proj = Linear{"proj.", stack.out_dim(), phoneme_vocab.size()};
}

A2pModel A2pModel::create(int feat_dim, const Vocabulary& phoneme_vocab,
                          const StackArch& arch, uint64_t seed) {
  A2pModel m;
  m.arch = arch;
  m.feat_dim = feat_dim;
  m.phoneme_vocab = phoneme_vocab;
  m.wire();
  Rng rng(seed);
  m.stack.init(m.params, rng);
  m.proj.init(m.params, rng);
  return m;
}

Matrix A2pModel::forward(const Matrix& feats) const {
  return log_softmax(proj.forward(params, stack.forward(params, feats, nullptr)));
}

double A2pModel::train_utterance(const Matrix& feats, const LabelSeq& phonemes) {
  RecurrentStack::Cache cache;
  Matrix hidden = stack.forward(params, feats, &cache);
  Matrix logits = proj.forward(params, hidden);
  Matrix logpost = log_softmax(logits);
  double loss = 0.0;
  Matrix dlogits = ctc_grad(logpost, phonemes, Vocabulary::kBlank, &loss);
  Matrix dhidden = proj.backward(params, hidden, dlogits);
  stack.backward(params, cache, dhidden);
  return loss;
}

// ---------------------------------------------------------------------------
// P2wCtcModel

void P2wCtcModel::wire() {
  stack = RecurrentStack{"stack.", phoneme_vocab.size(), arch.hidden, arch.layers,
                         arch.bidirectional};
  proj = Linear{"proj.", stack.out_dim(), word_vocab.size()};
}

P2wCtcModel P2wCtcModel::create(const Vocabulary& phoneme_vocab, const Vocabulary& word_vocab,
                                const StackArch& arch, uint64_t seed) {
  P2wCtcModel m;
  m.arch = arch;
  m.phoneme_vocab = phoneme_vocab;
  m.word_vocab = word_vocab;
  m.wire();
  Rng rng(seed);
  m.stack.init(m.params, rng);
  m.proj.init(m.params, rng);
  return m;
}

Matrix P2wCtcModel::forward(const Matrix& log_posts) const {
  const Matrix x = exp_matrix(log_posts);
  return log_softmax(proj.forward(params, stack.forward(params, x, nullptr)));
}

double P2wCtcModel::train_utterance(const Matrix& log_posts, const LabelSeq& words) {
  const Matrix x = exp_matrix(log_posts);
  RecurrentStack::Cache cache;
  Matrix hidden = stack.forward(params, x, &cache);
  Matrix logits = proj.forward(params, hidden);
  Matrix logpost = log_softmax(logits);
  double loss = 0.0;
  Matrix dlogits = ctc_grad(logpost, words, Vocabulary::kBlank, &loss);
  Matrix dhidden = proj.backward(params, hidden, dlogits);
  stack.backward(params, cache, dhidden);
  return loss;
}

LabelSeq P2wCtcModel::decode(const Matrix& log_posts) const {
  return greedy_decode(forward(log_posts), Vocabulary::kBlank);
}

void P2wCtcModel::extend_words(const Vocabulary& extended, uint64_t seed) {
  check_append_only(word_vocab, extended);
  Rng rng(seed);
  extend_param_rows(params, "proj.W", extended.size(), proj.in_dim, rng);
  extend_param_cols(params, "proj.b", extended.size());
  word_vocab = extended;
  wire();
}

// ---------------------------------------------------------------------------
// P2wS2sModel

void P2wS2sModel::wire() {
  encoder = RecurrentStack{"enc.", phoneme_vocab.size(), arch.enc_hidden, arch.enc_layers,
                           /*bidirectional=*/true};
  emb = Embedding{"emb.", word_vocab.size(), arch.embed_dim};
  decoder = RecurrentStack{"dec.", arch.embed_dim, arch.dec_hidden, arch.dec_layers,
                           /*bidirectional=*/false};
  attn = AdditiveAttention{"attn.", arch.dec_hidden, enc_out_dim(), arch.attn_dim};
  proj = Linear{"proj.", arch.dec_hidden + enc_out_dim(), word_vocab.size()};
  encoder2 = RecurrentStack{"enc2.", phoneme_vocab.size(), arch.enc_hidden, arch.enc_layers,
                            /*bidirectional=*/true};
}

P2wS2sModel P2wS2sModel::create(const Vocabulary& phoneme_vocab, const Vocabulary& word_vocab,
                                const S2sArch& arch, uint64_t seed, bool multimodal) {
  P2wS2sModel m;
  m.arch = arch;
  m.phoneme_vocab = phoneme_vocab;
  m.word_vocab = word_vocab;
  m.multimodal = multimodal;
  m.wire();
  Rng rng(seed);
  m.encoder.init(m.params, rng);
  m.emb.init(m.params, rng);
  m.decoder.init(m.params, rng);
  m.attn.init(m.params, rng);
  m.proj.init(m.params, rng);
  if (multimodal) m.encoder2.init(m.params, rng);
  return m;
}

namespace {

struct S2sForward {
  Matrix states;       // Tin x E
  Matrix keys;         // Tin x A
  LabelSeq dec_inputs; // sos + words
  LabelSeq targets;    // words + eos
  Matrix dec_out;      // M x Dh
  Matrix concat;       // M x (Dh + E)
  Matrix logpost;      // M x |Vw|
  double loss = 0.0;
  // caches for the backward pass
  RecurrentStack::Cache enc_cache;
  RecurrentStack::Cache dec_cache;
  Matrix emb_mat;
  std::vector<AdditiveAttention::StepCache> attn_caches;
};

}  // namespace

static void s2s_check_target(const LabelSeq& words) {
  if (words.empty()) throw DataError("s2s: empty target word sequence");
  for (int32_t w : words) {
    if (w == Vocabulary::kBlank || w == Vocabulary::kSos || w == Vocabulary::kEos) {
      throw DataError("s2s: reserved unit in target");
    }
  }
}

static S2sForward s2s_forward(const P2wS2sModel& m, const Matrix& log_posts,
                              const LabelSeq& words, bool second_encoder, bool keep_caches) {
  s2s_check_target(words);
  if (second_encoder && !m.multimodal) {
    throw DataError("s2s: second encoder requested but not present");
  }
  const RecurrentStack& enc = second_encoder ? m.encoder2 : m.encoder;

  S2sForward f;
  const Matrix x = exp_matrix(log_posts);
  f.states = enc.forward(m.params, x, keep_caches ? &f.enc_cache : nullptr);
  f.keys = m.attn.project_keys(m.params, f.states);

  f.dec_inputs.push_back(Vocabulary::kSos);
  f.dec_inputs.insert(f.dec_inputs.end(), words.begin(), words.end());
  f.targets = words;
  f.targets.push_back(Vocabulary::kEos);
  const int M = static_cast<int>(f.dec_inputs.size());

  f.emb_mat = m.emb.forward(m.params, f.dec_inputs);
  f.dec_out = m.decoder.forward(m.params, f.emb_mat, keep_caches ? &f.dec_cache : nullptr);

  f.attn_caches.resize(M);
  f.concat = Matrix(M, m.arch.dec_hidden + m.enc_out_dim());
  std::vector<double> ctx;
  for (int i = 0; i < M; ++i) {
    m.attn.forward_step(m.params, f.states, f.keys, f.dec_out.row(i),
                        keep_caches ? &f.attn_caches[i] : nullptr, &ctx);
    std::memcpy(f.concat.row(i), f.dec_out.row(i),
                sizeof(double) * static_cast<size_t>(m.arch.dec_hidden));
    std::memcpy(f.concat.row(i) + m.arch.dec_hidden, ctx.data(),
                sizeof(double) * ctx.size());
  }
  f.logpost = log_softmax(m.proj.forward(m.params, f.concat));
  for (int i = 0; i < M; ++i) f.loss -= f.logpost(i, f.targets[i]);
  return f;
}

double P2wS2sModel::loss(const Matrix& log_posts, const LabelSeq& words,
                         bool second_encoder) const {
  return s2s_forward(*this, log_posts, words, second_encoder, false).loss;
}

std::vector<double> P2wS2sModel::per_step_nll(const Matrix& log_posts, const LabelSeq& words,
                                              bool second_encoder) const {
  S2sForward f = s2s_forward(*this, log_posts, words, second_encoder, false);
  std::vector<double> out(f.targets.size());
  for (size_t i = 0; i < f.targets.size(); ++i) {
    out[i] = -f.logpost(static_cast<int>(i), f.targets[i]);
  }
  return out;
}

double P2wS2sModel::train_pair(const Matrix& log_posts, const LabelSeq& words,
                               bool second_encoder) {
  S2sForward f = s2s_forward(*this, log_posts, words, second_encoder, true);
  RecurrentStack& enc = second_encoder ? encoder2 : encoder;
  const int M = f.logpost.rows;
  const int Dh = arch.dec_hidden;
  const int E = enc_out_dim();

  // cross-entropy through the softmax
  Matrix dlogits(M, f.logpost.cols);
  for (int i = 0; i < M; ++i) {
    for (int k = 0; k < f.logpost.cols; ++k) dlogits(i, k) = std::exp(f.logpost(i, k));
    dlogits(i, f.targets[i]) -= 1.0;
  }

  Matrix dconcat = proj.backward(params, f.concat, dlogits);

  Matrix ddec(M, Dh);
  Matrix dstates(f.states.rows, E);
  Matrix dkeys(f.states.rows, arch.attn_dim);
  for (int i = 0; i < M; ++i) {
    std::memcpy(ddec.row(i), dconcat.row(i), sizeof(double) * static_cast<size_t>(Dh));
    std::vector<double> dctx(dconcat.row(i) + Dh, dconcat.row(i) + Dh + E);
    attn.backward_step(params, f.states, f.keys, f.dec_out.row(i), f.attn_caches[i], dctx,
                       ddec.row(i), dstates, dkeys);
  }
  attn.backward_keys(params, f.states, dkeys, dstates);

  Matrix demb = decoder.backward(params, f.dec_cache, ddec);
  emb.backward(params, f.dec_inputs, demb);
  enc.backward(params, f.enc_cache, dstates);
  return f.loss;
}

LabelSeq P2wS2sModel::decode(const Matrix& log_posts, int max_len) const {
  if (max_len < 1) throw DataError("s2s decode: max_len must be >= 1");
  const Matrix x = exp_matrix(log_posts);
  Matrix states = encoder.forward(params, x, nullptr);
  Matrix keys = attn.project_keys(params, states);

  LabelSeq out;
  auto state = decoder.zero_state();
  int32_t prev = Vocabulary::kSos;
  std::vector<double> ctx;
  Matrix concat(1, arch.dec_hidden + enc_out_dim());
  for (int step = 0; step < max_len; ++step) {
    Matrix e = emb.forward(params, {prev});
    std::vector<double> xt(e.row(0), e.row(0) + arch.embed_dim);
    std::vector<double> h = decoder.step(params, xt, state);
    attn.forward_step(params, states, keys, h.data(), nullptr, &ctx);
    std::memcpy(concat.row(0), h.data(), sizeof(double) * h.size());
    std::memcpy(concat.row(0) + arch.dec_hidden, ctx.data(), sizeof(double) * ctx.size());
    Matrix logits = proj.forward(params, concat);
    const int32_t best = argmax_row(logits, 0);
    if (best == Vocabulary::kEos) break;
    out.push_back(best);
    prev = best;
  }
  return out;
}

double P2wS2sModel::teacher_forced_accuracy(const Matrix& log_posts,
                                            const LabelSeq& words) const {
  S2sForward f = s2s_forward(*this, log_posts, words, false, false);
  int correct = 0;
  for (int i = 0; i < f.logpost.rows; ++i) {
    if (argmax_row(f.logpost, i) == f.targets[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(f.logpost.rows);
}

void P2wS2sModel::extend_words(const Vocabulary& extended, uint64_t seed) {
  check_append_only(word_vocab, extended);
  Rng rng(seed);
  extend_param_rows(params, "emb.E", extended.size(), arch.embed_dim, rng);
  extend_param_rows(params, "proj.W", extended.size(), proj.in_dim, rng);
  extend_param_cols(params, "proj.b", extended.size());
  word_vocab = extended;
  wire();
}

void P2wS2sModel::add_second_encoder(uint64_t seed) {
  if (multimodal) return;
  Rng rng(seed);
  encoder2.init(params, rng);
  multimodal = true;
}

}  // namespace masr
