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

#ifndef MASR_PIPELINE_HPP_
#define MASR_PIPELINE_HPP_

#include <fstream>
#include <functional>
#include <memory>
#include <string>

#include "masr/checkpoint.hpp"
#include "masr/config.hpp"
#include "masr/corpus.hpp"
#include "masr/lexicon.hpp"
#include "masr/nets.hpp"
#include "masr/psd.hpp"

namespace masr {

// One acoustic split: features aligned with transcripts.
struct CorpusBundle {
  std::vector<Utterance> feats;
  Corpus words;

  static CorpusBundle load(const std::string& feats_path, const std::string& words_path);
};

// Append-only TSV: epoch<TAB>split<TAB>metric<TAB>value. The file is
// truncated when the log is opened, so re-running a command reproduces it.
class TrainLog {
 public:
  TrainLog() = default;  // discards
  explicit TrainLog(const std::string& path);
  void add(int epoch, const std::string& split, const std::string& metric, double value);

 private:
  std::shared_ptr<std::ofstream> out_;
};

struct TrainOptions {
  int epochs = 5;
  double lr = 0.1;
  double clip_norm = 5.0;  // 0 disables clipping
  int dev_limit = 100;
  uint64_t seed = 1;
  int max_decode_len = 30;
  bool require_tdi = false;
};

struct TrainStats {
  int epochs = 0;
  int64_t steps = 0;
  int skipped_infeasible = 0;  // utterances shorter than their target
  int rejected_updates = 0;    // non-finite gradients
  double final_train_loss = 0.0;
  double final_dev_metric = -1.0;  // PER or WER, percent
};

LabelSeq words_to_ids(const Sentence& words, const Vocabulary& vocab);
Sentence ids_to_words(const LabelSeq& ids, const Vocabulary& vocab);

// Workflow step 2: CTC training of the acoustic-to-phoneme network on
// (features, oracle phoneme sequence) pairs.
struct A2pTrainResult {
  A2pModel model;
  TrainStats stats;
};
A2pTrainResult train_a2p(const CorpusBundle& train, const CorpusBundle& dev,
                         const Lexicon& lex, const StackArch& arch,
                         const TrainOptions& opts, TrainLog& log);

// Workflow step 3: text-data initialization of the P2W network on
// (one-hot oracle phoneme posteriors, word sequence) pairs. With random_init
// the model is returned untrained at stage p2w-fresh (the "no extra text
// data" baseline).
struct P2wTrainResult {
  P2wModel model;
  StageTag stage = StageTag::kP2wFresh;
  TrainStats stats;
};
P2wTrainResult init_p2w_tdi(const Corpus& text, const Corpus& text_dev, const Lexicon& lex,
                            const Vocabulary& word_vocab, P2wVariant variant,
                            const StackArch& stack_arch, const S2sArch& s2s_arch,
                            const TrainOptions& opts, bool random_init, TrainLog& log);

// Workflow steps 4-5: freeze the A2P network, push the acoustic features
// through it, PSD-downsample, and fine-tune the P2W network on the resulting
// soft posteriors. Advances the stage to p2w-finetuned.
TrainStats finetune_p2w(P2wModel& p2w, StageTag& stage, const A2pModel& a2p,
                        const CorpusBundle& train, const CorpusBundle& dev,
                        const PsdConfig& psd, const TrainOptions& opts, TrainLog& log);

// Composed acoustic-to-word decode: P2W(PSD(A2P(x))). Pure network
// evaluation plus the PSD rule; consumes nothing but the two models and the
// PSD configuration.
LabelSeq decode_modular(const A2pModel& a2p, const P2wModel& p2w, const Matrix& feats,
                        const PsdConfig& psd, int max_len);

enum class OovStrategy { kDirect, kAlternative, kMultimodal };
OovStrategy strategy_from_string(const std::string& s);
std::string to_string(OovStrategy s);

// Vocabulary extension with P2W-only retraining. The output layer (and
// embedding, for s2s) grows append-only; the A2P network is never touched.
//   direct       fine-tune on the extension text only
//   alternative  strict epoch alternation acoustic, text, acoustic, ...
//   multimodal   s2s only: a second encoder consumes the extension text's
//                oracle one-hots, the original encoder keeps the acoustic
//                posteriors, decoder and attention are shared
TrainStats extend_oov(P2wModel& p2w, StageTag& stage, const A2pModel& a2p,
                      OovStrategy strategy, const CorpusBundle& acoustic,
                      const Corpus& oov_text, const Lexicon& lex, const PsdConfig& psd,
                      const TrainOptions& opts, TrainLog& log);

// Evaluation helpers shared by the CLI and the integration tests.
double phoneme_error_rate(const A2pModel& a2p, const CorpusBundle& data, const Lexicon& lex,
                          int limit);
double oracle_input_wer(const P2wModel& p2w, const Corpus& text, const Lexicon& lex,
                        int max_len, int limit);
Corpus decode_corpus(const A2pModel& a2p, const P2wModel& p2w, const CorpusBundle& data,
                     const PsdConfig& psd, int max_len);

}  // namespace masr

#endif  // MASR_PIPELINE_HPP_
