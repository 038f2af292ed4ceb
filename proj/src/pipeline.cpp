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

#include "masr/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "masr/ctc.hpp"
#include "masr/error.hpp"
#include "masr/eval.hpp"
#include "masr/rng.hpp"
#include "masr/toygen.hpp"

namespace masr {

CorpusBundle CorpusBundle::load(const std::string& feats_path, const std::string& words_path) {
  CorpusBundle b;
  b.feats = load_feature_archive(feats_path);
  b.words = load_transcripts(words_path);
  if (b.feats.size() != b.words.size()) {
    throw DataError("corpus bundle: " + std::to_string(b.feats.size()) + " utterances vs " +
                    std::to_string(b.words.size()) + " transcripts");
  }
  return b;
}

TrainLog::TrainLog(const std::string& path) : out_(std::make_shared<std::ofstream>()) {
  out_->open(path, std::ios::trunc);
  if (!*out_) throw DataError("cannot open training log: " + path);
}

void TrainLog::add(int epoch, const std::string& split, const std::string& metric,
                   double value) {
  if (!out_) return;
  *out_ << epoch << "\t" << split << "\t" << metric << "\t" << value << "\n";
  out_->flush();
}

LabelSeq words_to_ids(const Sentence& words, const Vocabulary& vocab) {
  LabelSeq ids;
  ids.reserve(words.size());
  for (const auto& w : words) ids.push_back(vocab.find_or_unk(w));
  return ids;
}

Sentence ids_to_words(const LabelSeq& ids, const Vocabulary& vocab) {
  Sentence out;
  out.reserve(ids.size());
  for (int32_t id : ids) out.push_back(vocab.unit(id));
  return out;
}

namespace {

struct SeqExample {
  Matrix input;
  LabelSeq target;
  bool second_encoder = false;
};
using Dataset = std::vector<SeqExample>;

// One pass of per-utterance SGD over `data` in a seeded shuffled order.
// Infeasible CTC targets are skipped and counted; non-finite gradients reject
// the update and are counted.
void run_epoch(ParamStore& params, const Dataset& data,
               const std::function<double(const SeqExample&)>& step_loss,
               const TrainOptions& opts, int epoch, TrainStats& stats, TrainLog& log,
               const std::string& split) {
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix64(opts.seed, 0xE50C + static_cast<uint64_t>(epoch)));
  rng.shuffle(order);

  double loss_sum = 0.0;
  int64_t attempted = 0;
  for (size_t idx : order) {
    double loss;
    try {
      loss = step_loss(data[idx]);
    } catch (const InfeasibleTargetError&) {
      ++stats.skipped_infeasible;
      continue;
    }
    if (opts.clip_norm > 0.0) {
      const double norm = params.grad_norm();
      if (std::isfinite(norm) && norm > opts.clip_norm) {
        params.scale_grads(opts.clip_norm / norm);
      }
    }
    try {
      sgd_step(params, opts.lr);
    } catch (const NumericError&) {
      params.zero_grads();
      ++stats.rejected_updates;
      continue;
    }
    loss_sum += loss;
    ++attempted;
    ++stats.steps;
  }
  stats.final_train_loss = attempted > 0 ? loss_sum / static_cast<double>(attempted) : 0.0;
  log.add(epoch, split, "loss", stats.final_train_loss);
  ++stats.epochs;
}

TrainStats run_sgd(ParamStore& params, const Dataset& data,
                   const std::function<double(const SeqExample&)>& step_loss,
                   const TrainOptions& opts, TrainLog& log,
                   const std::function<double()>& dev_metric,
                   const std::string& dev_name) {
  TrainStats stats;
  for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
    run_epoch(params, data, step_loss, opts, epoch, stats, log, "train");
    if (dev_metric) {
      stats.final_dev_metric = dev_metric();
      log.add(epoch, "dev", dev_name, stats.final_dev_metric);
    }
  }
  return stats;
}

LabelSeq oracle_phonemes(const Sentence& words, const Lexicon& lex, size_t index) {
  return generate_phoneme_sequence(words, lex, utterance_phoneme_seed(words, index));
}

double wer_percent(const Corpus& refs, const Corpus& hyps) {
  return score_corpus(refs, hyps).all.wer();
}

}  // namespace

// ---------------------------------------------------------------------------
// train_a2p

A2pTrainResult train_a2p(const CorpusBundle& train, const CorpusBundle& dev,
                         const Lexicon& lex, const StackArch& arch,
                         const TrainOptions& opts, TrainLog& log) {
  if (train.feats.empty()) throw DataError("train_a2p: empty training corpus");
  const int feat_dim = train.feats[0].feats.cols;

  A2pTrainResult result{
      A2pModel::create(feat_dim, lex.phoneme_vocab(), arch, opts.seed), {}};
  A2pModel& model = result.model;

  Dataset data;
  data.reserve(train.feats.size());
  for (size_t i = 0; i < train.feats.size(); ++i) {
    data.push_back({train.feats[i].feats, oracle_phonemes(train.words[i], lex, i), false});
  }

  std::vector<LabelSeq> dev_targets;
  const size_t dev_n = std::min<size_t>(dev.feats.size(), static_cast<size_t>(opts.dev_limit));
  for (size_t i = 0; i < dev_n; ++i) {
    dev_targets.push_back(oracle_phonemes(dev.words[i], lex, i));
  }

  auto step = [&](const SeqExample& ex) { return model.train_utterance(ex.input, ex.target); };
  auto dev_per = [&]() {
    int64_t errors = 0, tokens = 0;
    for (size_t i = 0; i < dev_n; ++i) {
      const LabelSeq hyp = greedy_decode(model.forward(dev.feats[i].feats));
      errors += edit_distance(dev_targets[i], hyp).total();
      tokens += static_cast<int64_t>(dev_targets[i].size());
    }
    return tokens > 0 ? 100.0 * static_cast<double>(errors) / static_cast<double>(tokens)
                      : 0.0;
  };

  result.stats = run_sgd(model.params, data, step, opts, log,
                         dev_n > 0 ? std::function<double()>(dev_per) : nullptr, "per");
  return result;
}

// ---------------------------------------------------------------------------
// init_p2w_tdi

P2wTrainResult init_p2w_tdi(const Corpus& text, const Corpus& text_dev, const Lexicon& lex,
                            const Vocabulary& word_vocab, P2wVariant variant,
                            const StackArch& stack_arch, const S2sArch& s2s_arch,
                            const TrainOptions& opts, bool random_init, TrainLog& log) {
  P2wTrainResult result{
      make_p2w(variant, lex.phoneme_vocab(), word_vocab, stack_arch, s2s_arch, opts.seed),
      StageTag::kP2wFresh,
      {}};
  if (random_init) return result;

  const int32_t pv_size = lex.phoneme_vocab().size();
  Dataset data;
  data.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i].empty()) continue;
    data.push_back({one_hot_posteriors(oracle_phonemes(text[i], lex, i), pv_size),
                    words_to_ids(text[i], word_vocab), false});
  }
  if (data.empty()) throw DataError("init_p2w_tdi: no usable text sentences");

  P2wModel& model = result.model;
  auto step = [&](const SeqExample& ex) {
    return model.train_utterance(ex.input, ex.target, false);
  };
  auto dev_wer = [&]() {
    return oracle_input_wer(model, text_dev, lex, opts.max_decode_len, opts.dev_limit);
  };
  result.stats = run_sgd(model.params(), data, step, opts, log,
                         text_dev.empty() ? nullptr : std::function<double()>(dev_wer), "wer");
  result.stage = StageTag::kP2wTdi;
  return result;
}

// ---------------------------------------------------------------------------
// finetune_p2w

TrainStats finetune_p2w(P2wModel& p2w, StageTag& stage, const A2pModel& a2p,
                        const CorpusBundle& train, const CorpusBundle& dev,
                        const PsdConfig& psd, const TrainOptions& opts, TrainLog& log) {
  if (stage == StageTag::kP2wFinetuned || stage == StageTag::kP2wOovExtended) {
    throw StageError("finetune-p2w: checkpoint is already " + to_string(stage));
  }
  if (stage == StageTag::kP2wFresh && opts.require_tdi) {
    throw StageError("finetune-p2w: config demands text-data initialization first "
                     "(expected stage p2w-tdi, got p2w-fresh)");
  }
  if (p2w.phoneme_vocab().fingerprint() != a2p.phoneme_vocab.fingerprint()) {
    throw DataError("finetune-p2w: phoneme vocabulary fingerprints differ; "
                    "a2p and p2w checkpoints do not compose");
  }

  // The A2P network is fixed here; its posteriors are computed once.
  Dataset data;
  data.reserve(train.feats.size());
  for (size_t i = 0; i < train.feats.size(); ++i) {
    data.push_back({psd_downsample(a2p.forward(train.feats[i].feats), psd).first,
                    words_to_ids(train.words[i], p2w.word_vocab()), false});
  }

  auto step = [&](const SeqExample& ex) {
    return p2w.train_utterance(ex.input, ex.target, false);
  };
  auto dev_wer = [&]() {
    const size_t n = std::min<size_t>(dev.feats.size(), static_cast<size_t>(opts.dev_limit));
    Corpus refs, hyps;
    for (size_t i = 0; i < n; ++i) {
      refs.push_back(dev.words[i]);
      hyps.push_back(ids_to_words(
          decode_modular(a2p, p2w, dev.feats[i].feats, psd, opts.max_decode_len),
          p2w.word_vocab()));
    }
    return wer_percent(refs, hyps);
  };

  TrainStats stats =
      run_sgd(p2w.params(), data, step, opts, log,
              dev.feats.empty() ? nullptr : std::function<double()>(dev_wer), "wer");
  stage = StageTag::kP2wFinetuned;
  return stats;
}

// ---------------------------------------------------------------------------
// decode

LabelSeq decode_modular(const A2pModel& a2p, const P2wModel& p2w, const Matrix& feats,
                        const PsdConfig& psd, int max_len) {
  return p2w.decode(psd_downsample(a2p.forward(feats), psd).first, max_len);
}

// ---------------------------------------------------------------------------
// OOV extension

OovStrategy strategy_from_string(const std::string& s) {
  if (s == "direct") return OovStrategy::kDirect;
  if (s == "alternative") return OovStrategy::kAlternative;
  if (s == "multimodal") return OovStrategy::kMultimodal;
  throw DataError("unknown OOV strategy: " + s);
}

std::string to_string(OovStrategy s) {
  switch (s) {
    case OovStrategy::kDirect: return "direct";
    case OovStrategy::kAlternative: return "alternative";
    case OovStrategy::kMultimodal: return "multimodal";
  }
  throw DataError("bad OOV strategy");
}

TrainStats extend_oov(P2wModel& p2w, StageTag& stage, const A2pModel& a2p,
                      OovStrategy strategy, const CorpusBundle& acoustic,
                      const Corpus& oov_text, const Lexicon& lex, const PsdConfig& psd,
                      const TrainOptions& opts, TrainLog& log) {
  if (strategy == OovStrategy::kMultimodal && p2w.variant == P2wVariant::kCtc) {
    throw UnsupportedStrategyError(
        "extend-oov: the multimodal strategy is defined for the s2s variant only");
  }
  if (stage != StageTag::kP2wFinetuned && stage != StageTag::kP2wOovExtended) {
    throw StageError("extend-oov: expected a p2w-finetuned checkpoint, got " +
                     to_string(stage));
  }
  if (p2w.phoneme_vocab().fingerprint() != a2p.phoneme_vocab.fingerprint()) {
    throw DataError("extend-oov: phoneme vocabulary fingerprints differ");
  }

  const Vocabulary extended = extend_vocabulary(p2w.word_vocab(), oov_text);
  p2w.extend_words(extended, mix64(opts.seed, 0x00f));
  const bool second = strategy == OovStrategy::kMultimodal;
  if (second) p2w.s2s->add_second_encoder(mix64(opts.seed, 0x02e));

  const int32_t pv_size = lex.phoneme_vocab().size();
  Dataset text_data;
  for (size_t i = 0; i < oov_text.size(); ++i) {
    if (oov_text[i].empty()) continue;
    text_data.push_back({one_hot_posteriors(oracle_phonemes(oov_text[i], lex, i), pv_size),
                         words_to_ids(oov_text[i], extended), second});
  }

  Dataset acoustic_data;
  if (strategy != OovStrategy::kDirect) {
    for (size_t i = 0; i < acoustic.feats.size(); ++i) {
      acoustic_data.push_back(
          {psd_downsample(a2p.forward(acoustic.feats[i].feats), psd).first,
           words_to_ids(acoustic.words[i], extended), false});
    }
  }

  auto step = [&](const SeqExample& ex) {
    return p2w.train_utterance(ex.input, ex.target, ex.second_encoder);
  };

  TrainStats stats;
  switch (strategy) {
    case OovStrategy::kDirect: {
      for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        run_epoch(p2w.params(), text_data, step, opts, epoch, stats, log, "oov-text");
      }
      break;
    }
    case OovStrategy::kAlternative: {
      // Strict alternation; each corpus is visited exactly once per round.
      int epoch = 0;
      for (int round = 1; round <= opts.epochs; ++round) {
        run_epoch(p2w.params(), acoustic_data, step, opts, ++epoch, stats, log, "acoustic");
        run_epoch(p2w.params(), text_data, step, opts, ++epoch, stats, log, "oov-text");
      }
      break;
    }
    case OovStrategy::kMultimodal: {
      Dataset mixed = acoustic_data;
      mixed.insert(mixed.end(), text_data.begin(), text_data.end());
      for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        run_epoch(p2w.params(), mixed, step, opts, epoch, stats, log, "mixed");
      }
      break;
    }
  }
  stage = StageTag::kP2wOovExtended;
  return stats;
}

// ---------------------------------------------------------------------------
// evaluation helpers

double phoneme_error_rate(const A2pModel& a2p, const CorpusBundle& data, const Lexicon& lex,
                          int limit) {
  const size_t n = std::min<size_t>(data.feats.size(), static_cast<size_t>(limit));
  int64_t errors = 0, tokens = 0;
  for (size_t i = 0; i < n; ++i) {
    const LabelSeq ref = generate_phoneme_sequence(data.words[i], lex,
                                                   utterance_phoneme_seed(data.words[i], i));
    const LabelSeq hyp = greedy_decode(a2p.forward(data.feats[i].feats));
    errors += edit_distance(ref, hyp).total();
    tokens += static_cast<int64_t>(ref.size());
  }
  if (tokens == 0) throw DataError("phoneme_error_rate: no reference tokens");
  return 100.0 * static_cast<double>(errors) / static_cast<double>(tokens);
}

double oracle_input_wer(const P2wModel& p2w, const Corpus& text, const Lexicon& lex,
                        int max_len, int limit) {
  const size_t n = std::min<size_t>(text.size(), static_cast<size_t>(limit));
  Corpus refs, hyps;
  const int32_t pv_size = p2w.phoneme_vocab().size();
  for (size_t i = 0; i < n; ++i) {
    if (text[i].empty()) continue;
    const Matrix oh = one_hot_posteriors(
        generate_phoneme_sequence(text[i], lex, utterance_phoneme_seed(text[i], i)), pv_size);
    refs.push_back(text[i]);
    hyps.push_back(ids_to_words(p2w.decode(oh, max_len), p2w.word_vocab()));
  }
  return wer_percent(refs, hyps);
}

Corpus decode_corpus(const A2pModel& a2p, const P2wModel& p2w, const CorpusBundle& data,
                     const PsdConfig& psd, int max_len) {
  Corpus hyps;
  hyps.reserve(data.feats.size());
  for (const auto& utt : data.feats) {
    hyps.push_back(
        ids_to_words(decode_modular(a2p, p2w, utt.feats, psd, max_len), p2w.word_vocab()));
  }
  return hyps;
}

}  // namespace masr
