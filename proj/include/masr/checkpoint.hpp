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

#ifndef MASR_CHECKPOINT_HPP_
#define MASR_CHECKPOINT_HPP_

#include <memory>
#include <string>

#include "masr/nets.hpp"
#include "masr/psd.hpp"

namespace masr {

// Training stages move forward only: a p2w model is fresh, then text-data
// initialized, then fine-tuned on acoustic posteriors, then (optionally)
// OOV-extended.
enum class StageTag { kA2p, kP2wFresh, kP2wTdi, kP2wFinetuned, kP2wOovExtended };

std::string to_string(StageTag stage);
StageTag stage_from_string(const std::string& s);

enum class P2wVariant { kCtc, kS2s };
std::string to_string(P2wVariant v);
P2wVariant variant_from_string(const std::string& s);

struct CheckpointMeta {
  StageTag stage = StageTag::kA2p;
  PsdConfig psd;
  uint64_t seed = 0;
  std::string config_hash;
};

// Tagged wrapper over the two P2W variants so pipeline code and the CLI can
// stay variant-agnostic.
struct P2wModel {
  P2wVariant variant = P2wVariant::kCtc;
  std::unique_ptr<P2wCtcModel> ctc;
  std::unique_ptr<P2wS2sModel> s2s;

  const Vocabulary& word_vocab() const;
  const Vocabulary& phoneme_vocab() const;
  ParamStore& params();
  const ParamStore& params() const;

  double train_utterance(const Matrix& log_posts, const LabelSeq& words,
                         bool second_encoder = false);
  double loss(const Matrix& log_posts, const LabelSeq& words) const;
  LabelSeq decode(const Matrix& log_posts, int max_len) const;
  void extend_words(const Vocabulary& extended, uint64_t seed);
};

P2wModel make_p2w(P2wVariant variant, const Vocabulary& phoneme_vocab,
                  const Vocabulary& word_vocab, const StackArch& stack_arch,
                  const S2sArch& s2s_arch, uint64_t seed);

// Checkpoint container: magic "MASRCKPT", u32 format version, u64 header
// length, JSON header (architecture, vocabularies, fingerprints, PSD config,
// stage tag, seed, config hash, parameter table), then the parameter payload
// as little-endian 64-bit floats in registration order.
void save_a2p_checkpoint(const std::string& path, const A2pModel& model,
                         const CheckpointMeta& meta);
A2pModel load_a2p_checkpoint(const std::string& path, CheckpointMeta* meta = nullptr);

void save_p2w_checkpoint(const std::string& path, const P2wModel& model,
                         const CheckpointMeta& meta);
P2wModel load_p2w_checkpoint(const std::string& path, CheckpointMeta* meta = nullptr);

// Distinguishes a2p from p2w files by reading only the header.
std::string checkpoint_kind(const std::string& path);

}  // namespace masr

#endif  // MASR_CHECKPOINT_HPP_
