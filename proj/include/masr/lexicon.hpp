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

#ifndef MASR_LEXICON_HPP_
#define MASR_LEXICON_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "masr/matrix.hpp"
#include "masr/rng.hpp"
#include "masr/types.hpp"
#include "masr/vocab.hpp"

namespace masr {

// Word -> pronunciation map over a phoneme vocabulary. Repeated entries for a
// word are its polyphone alternatives, kept in file order.
class Lexicon {
 public:
  Lexicon() = default;

  // Adds a pronunciation; builds up the phoneme vocabulary as units appear.
  void add(const std::string& word, const std::vector<std::string>& phonemes);

  bool has(const std::string& word) const { return prons_.count(word) > 0; }
  // Throws LexiconGapError naming the word.
  const std::vector<LabelSeq>& prons(const std::string& word) const;
  const Vocabulary& phoneme_vocab() const { return phoneme_vocab_; }
  const std::vector<std::string>& words() const { return words_; }  // insertion order
  size_t size() const { return words_.size(); }

  // File format: `word<TAB>phoneme phoneme ...`, one entry per line;
  // repeated word lines define polyphones.
  static Lexicon load(const std::string& path);
  void save(const std::string& path) const;

 private:
  Vocabulary phoneme_vocab_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::vector<LabelSeq>> prons_;
};

// Oracle phoneme sequence for a word sequence: one pronunciation per word
// occurrence, polyphones resolved by seeded uniform choice, concatenated.
LabelSeq generate_phoneme_sequence(const Sentence& words, const Lexicon& lex, Rng& rng);
LabelSeq generate_phoneme_sequence(const Sentence& words, const Lexicon& lex, uint64_t seed);

// One-hot distribution form of a label sequence, as log posteriors
// (0 on the hot unit, -inf elsewhere). Emits no blank frames.
Matrix one_hot_posteriors(const LabelSeq& labels, int32_t vocab_size);

}  // namespace masr

#endif  // MASR_LEXICON_HPP_
