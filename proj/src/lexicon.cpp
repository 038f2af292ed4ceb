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

#include "masr/lexicon.hpp"

#include <fstream>
#include <sstream>

#include "masr/error.hpp"

namespace masr {

void Lexicon::add(const std::string& word, const std::vector<std::string>& phonemes) {
  if (word.empty()) throw DataError("lexicon: empty word");
  if (phonemes.empty()) throw DataError("lexicon: empty pronunciation for '" + word + "'");
  LabelSeq pron;
  pron.reserve(phonemes.size());
  for (const auto& p : phonemes) pron.push_back(phoneme_vocab_.add(p));
  auto it = prons_.find(word);
  if (it == prons_.end()) {
    words_.push_back(word);
    prons_[word] = {std::move(pron)};
  } else {
    it->second.push_back(std::move(pron));
  }
}

const std::vector<LabelSeq>& Lexicon::prons(const std::string& word) const {
  auto it = prons_.find(word);
  if (it == prons_.end()) {
    throw LexiconGapError("lexicon has no pronunciation for word '" + word + "'");
  }
  return it->second;
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read lexicon file: " + path);
  Lexicon lex;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("lexicon " + path + ":" + std::to_string(lineno) +
                      ": expected word<TAB>phonemes");
    }
    std::string word = line.substr(0, tab);
    std::istringstream iss(line.substr(tab + 1));
    std::vector<std::string> phonemes;
    std::string tok;
    while (iss >> tok) phonemes.push_back(tok);
    lex.add(word, phonemes);
  }
  return lex;
}

void Lexicon::save(const std::string& path) const {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write lexicon file: " + path);
  for (const auto& w : words_) {
    for (const auto& pron : prons_.at(w)) {
      f << w << "\t";
      for (size_t i = 0; i < pron.size(); ++i) {
        f << (i ? " " : "") << phoneme_vocab_.unit(pron[i]);
      }
      f << "\n";
    }
  }
}

LabelSeq generate_phoneme_sequence(const Sentence& words, const Lexicon& lex, Rng& rng) {
  LabelSeq out;
  for (const auto& w : words) {
    const auto& prons = lex.prons(w);
    const auto& pick =
        prons.size() == 1 ? prons[0] : prons[rng.uniform_int(static_cast<int64_t>(prons.size()))];
    out.insert(out.end(), pick.begin(), pick.end());
  }
  return out;
}

LabelSeq generate_phoneme_sequence(const Sentence& words, const Lexicon& lex, uint64_t seed) {
  Rng rng(seed);
  return generate_phoneme_sequence(words, lex, rng);
}

Matrix one_hot_posteriors(const LabelSeq& labels, int32_t vocab_size) {
  Matrix out(static_cast<int>(labels.size()), vocab_size, kLogZero);
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= vocab_size) {
      throw DataError("one_hot_posteriors: label out of range");
    }
    out(static_cast<int>(i), labels[i]) = 0.0;
  }
  return out;
}

}  // namespace masr
