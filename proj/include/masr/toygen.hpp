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

#ifndef MASR_TOYGEN_HPP_
#define MASR_TOYGEN_HPP_

#include <string>

#include "masr/config.hpp"
#include "masr/corpus.hpp"
#include "masr/lexicon.hpp"

namespace masr {

// Seed for the polyphone choices of one utterance, derived from the sentence
// content and its line index. Feature synthesis and target generation both go
// through this, so realized pronunciations and training targets always agree.
uint64_t utterance_phoneme_seed(const Sentence& words, size_t index);

// Synthetic stand-in for a real speech corpus. Writes, fully seeded:
//   lexicon.txt                     word<TAB>phonemes, polyphones as repeats
//   vocab_phoneme.txt vocab_word.txt
//   train/dev/test.txt + .feats     acoustic splits (dev/test contain the
//                                   designated OOV words, train never does)
//   text.txt text_dev.txt           large text corpus + held-out text
//   text_oov.txt                    sentences containing the OOV words
//   manifest.tsv                    seed, config hash, counts
// Features realize each phoneme as a few frames of its indicator vector plus
// Gaussian noise.
void generate_toy_corpus(const RunConfig& cfg, const std::string& out_dir);

}  // namespace masr

#endif  // MASR_TOYGEN_HPP_
