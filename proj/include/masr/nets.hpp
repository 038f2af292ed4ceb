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

#ifndef MASR_NETS_HPP_
#define MASR_NETS_HPP_

#include <memory>
#include <string>

#include "masr/matrix.hpp"
#include "masr/nn.hpp"
#include "masr/param_store.hpp"
#include "masr/types.hpp"
#include "masr/vocab.hpp"

namespace masr {

struct StackArch {
  int layers = 2;
  int hidden = 64;
  bool bidirectional = true;
};

// Acoustic-to-phoneme network: a bidirectional recurrent stack with a softmax
// output over the phoneme vocabulary, trained with the CTC criterion.
struct A2pModel {
  StackArch arch;
  int feat_dim = 0;
  Vocabulary phoneme_vocab;
  ParamStore params;

  RecurrentStack stack;
  Linear proj;

  static A2pModel create(int feat_dim, const Vocabulary& phoneme_vocab,
                         const StackArch& arch, uint64_t seed);
  void wire();  // derives layer descriptors from arch; registers nothing

  // T x |Vp| log posteriors.
  Matrix forward(const Matrix& feats) const;

  // CTC loss for one utterance; gradients accumulate into `params`.
  double train_utterance(const Matrix& feats, const LabelSeq& phonemes);
};

// Phoneme-to-word network, CTC variant. Consumes (the exp of) phoneme log
// posteriors and emits word log posteriors frame-synchronously.
struct P2wCtcModel {
  StackArch arch;
  Vocabulary phoneme_vocab;  // input basis, fixed by the upstream A2P
  Vocabulary word_vocab;
  ParamStore params;

  RecurrentStack stack;
  Linear proj;

  static P2wCtcModel create(const Vocabulary& phoneme_vocab, const Vocabulary& word_vocab,
                            const StackArch& arch, uint64_t seed);
  void wire();

  Matrix forward(const Matrix& log_posts) const;  // T x |Vw| log posteriors
  double train_utterance(const Matrix& log_posts, const LabelSeq& words);
  LabelSeq decode(const Matrix& log_posts) const;

  // Output-layer surgery: append rows for new words, keep old rows bitwise.
  void extend_words(const Vocabulary& extended, uint64_t seed);
};

struct S2sArch {
  int enc_layers = 2;
  int enc_hidden = 64;
  int dec_layers = 2;
  int dec_hidden = 64;
  int embed_dim = 32;
  int attn_dim = 64;
};

// Phoneme-to-word network, attention encoder-decoder variant. The decoder is
// teacher-forced during training: step i sees sos + the gold prefix and is
// trained to emit word i, with eos as the final target.
struct P2wS2sModel {
  S2sArch arch;
  Vocabulary phoneme_vocab;
  Vocabulary word_vocab;
  bool multimodal = false;  // second encoder present (OOV extension)
  ParamStore params;

  RecurrentStack encoder;
  RecurrentStack encoder2;
  Embedding emb;
  RecurrentStack decoder;
  AdditiveAttention attn;
  Linear proj;

  static P2wS2sModel create(const Vocabulary& phoneme_vocab, const Vocabulary& word_vocab,
                            const S2sArch& arch, uint64_t seed, bool multimodal = false);
  void wire();

  int enc_out_dim() const { return 2 * arch.enc_hidden; }

  // Teacher-forced negative log-likelihood (includes the eos step).
  double loss(const Matrix& log_posts, const LabelSeq& words, bool second_encoder = false) const;
  // The per-step summands of `loss`, one per target position.
  std::vector<double> per_step_nll(const Matrix& log_posts, const LabelSeq& words,
                                   bool second_encoder = false) const;
  double train_pair(const Matrix& log_posts, const LabelSeq& words, bool second_encoder = false);

  // Greedy autoregressive decode; stops on eos or max_len; output excludes
  // sos/eos.
  LabelSeq decode(const Matrix& log_posts, int max_len) const;

  // Fraction of teacher-forced steps whose argmax equals the gold target.
  double teacher_forced_accuracy(const Matrix& log_posts, const LabelSeq& words) const;

  void extend_words(const Vocabulary& extended, uint64_t seed);
  void add_second_encoder(uint64_t seed);
};

// Checks that `extended` preserves every index of `base`, i.e. it only
// appends. Throws DataError otherwise.
void check_append_only(const Vocabulary& base, const Vocabulary& extended);

}  // namespace masr

#endif  // MASR_NETS_HPP_
