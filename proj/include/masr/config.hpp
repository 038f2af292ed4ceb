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

#ifndef MASR_CONFIG_HPP_
#define MASR_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "masr/nets.hpp"
#include "masr/psd.hpp"

namespace masr {

// Toy-corpus generator parameters. Sizes are artifact defaults chosen so the
// whole pipeline runs in minutes on a laptop.
struct GenConfig {
  int num_phonemes = 20;
  int num_words = 200;          // common words, Zipf-distributed
  int num_oov_words = 30;       // appear in test/dev and the extension text only
  int word_min_phonemes = 2;
  int word_max_phonemes = 5;
  double polyphone_fraction = 0.1;
  double zipf_exponent = 0.8;
  int train_utterances = 800;
  int dev_utterances = 80;
  int test_utterances = 200;
  int text_sentences = 2600;      // TDI corpus
  int text_dev_sentences = 200;   // held-out text for oracle-input WER
  int oov_text_sentences = 250;   // extension corpus, sentences containing OOV words
  int min_occurrence = 5;         // floor on each OOV word's count in the extension text
  int sentence_min_words = 3;
  int sentence_max_words = 12;
  int frames_min = 3;
  int frames_max = 6;
  int gap_min_frames = 1;   // noise-only frames between phoneme segments
  int gap_max_frames = 2;
  double noise_sigma = 0.3;
  double oov_sentence_fraction = 0.35;  // test/dev sentences containing an OOV word
};

struct StageTrainConfig {
  int epochs = 5;
  double lr = 0.1;
};

// Flat key=value configuration with CLI-flag overrides; flags win. Unknown
// keys are an error.
struct RunConfig {
  uint64_t seed = 1;

  GenConfig gen;

  StackArch a2p_arch{1, 64, true};
  StackArch p2w_arch{1, 64, true};
  S2sArch s2s_arch{2, 64, 2, 64, 32, 64};

  PsdConfig psd{8.0, 1};

  StageTrainConfig train_a2p{12, 0.1};
  StageTrainConfig train_tdi{10, 0.1};
  StageTrainConfig train_ft{14, 0.03};
  StageTrainConfig train_oov{4, 0.05};
  int oov_rounds = 3;

  double clip_norm = 5.0;
  int dev_limit = 100;
  bool require_tdi = false;
  int max_decode_len = 30;

  // key=value lines; '#' starts a comment
  static RunConfig from_file(const std::string& path);
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  std::string canonical() const;  // sorted key=value lines
  std::string hash() const;       // fnv-1a of canonical()
};

}  // namespace masr

#endif  // MASR_CONFIG_HPP_
