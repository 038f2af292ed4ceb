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

#include "masr/toygen.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_map>

#include "masr/error.hpp"
#include "masr/rng.hpp"

namespace masr {

namespace {

std::string zero_pad(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

// Zipf sampler over ranks 0..n-1.
class ZipfSampler {
 public:
  ZipfSampler(int n, double exponent) : cum_(n) {
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      total += 1.0 / std::pow(static_cast<double>(k + 1), exponent);
      cum_[k] = total;
    }
    for (double& c : cum_) c /= total;
  }
  int sample(Rng& rng) const {
    const double u = rng.uniform01();
    return static_cast<int>(std::lower_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
  }

 private:
  std::vector<double> cum_;
};

struct ToyInventory {
  std::vector<std::string> phonemes;
  std::vector<std::string> common_words;
  std::vector<std::string> oov_words;
  Lexicon lexicon;
};

ToyInventory build_inventory(const GenConfig& g, uint64_t seed) {
  if (g.num_phonemes < 2) throw DataError("gen: need at least two phonemes");
  if (g.word_min_phonemes < 1 || g.word_max_phonemes < g.word_min_phonemes) {
    throw DataError("gen: bad word phoneme-length range");
  }
  ToyInventory inv;
  const int pw = g.num_phonemes > 99 ? 3 : 2;
  for (int i = 0; i < g.num_phonemes; ++i) inv.phonemes.push_back("p" + zero_pad(i + 1, pw));
  const int ww = g.num_words > 999 ? 4 : 3;
  for (int i = 0; i < g.num_words; ++i) inv.common_words.push_back("w" + zero_pad(i + 1, ww));
  for (int i = 0; i < g.num_oov_words; ++i) inv.oov_words.push_back("z" + zero_pad(i + 1, 2));

  Rng rng(mix64(seed, 0x13C));
  std::set<std::vector<std::string>> used;
  auto sample_pron = [&]() {
    // Pronunciations are unique across the lexicon so the phoneme-to-word map
    // is invertible, and never repeat a phoneme back-to-back: the synthetic
    // features give a doubled phoneme no boundary cue, which would make its
    // alignment unrecoverable.
    for (int attempt = 0;; ++attempt) {
      const int len = g.word_min_phonemes +
                      static_cast<int>(rng.uniform_int(g.word_max_phonemes - g.word_min_phonemes + 1)) +
                      (attempt > 50 ? 1 : 0);
      std::vector<std::string> pron;
      for (int i = 0; i < len; ++i) {
        std::string p = inv.phonemes[rng.uniform_int(g.num_phonemes)];
        while (i > 0 && p == pron[i - 1]) p = inv.phonemes[rng.uniform_int(g.num_phonemes)];
        pron.push_back(p);
      }
      if (used.insert(pron).second) return pron;
    }
  };

  auto add_word = [&](const std::string& w) { inv.lexicon.add(w, sample_pron()); };
  for (const auto& w : inv.common_words) add_word(w);
  for (const auto& w : inv.oov_words) add_word(w);
  // polyphone alternatives
  for (const auto& w : inv.common_words) {
    if (rng.uniform01() < g.polyphone_fraction) inv.lexicon.add(w, sample_pron());
  }
  return inv;
}

Sentence sample_sentence(const GenConfig& g, const ToyInventory& inv,
                         const ZipfSampler& zipf, Rng& rng, bool with_oov) {
  const int len = g.sentence_min_words +
                  static_cast<int>(rng.uniform_int(g.sentence_max_words - g.sentence_min_words + 1));
  Sentence s;
  for (int i = 0; i < len; ++i) s.push_back(inv.common_words[zipf.sample(rng)]);
  if (with_oov && !inv.oov_words.empty()) {
    const int count = 1 + (rng.uniform01() < 0.3 ? 1 : 0);
    for (int i = 0; i < count; ++i) {
      s[rng.uniform_int(len)] = inv.oov_words[rng.uniform_int(inv.oov_words.size())];
    }
  }
  return s;
}

Matrix synthesize_features(const GenConfig& g, const LabelSeq& phonemes, Rng& rng) {
  // each phoneme becomes a run of indicator frames; segments are separated by
  // noise-only gap frames (transitions/silence), which is what the blank
  // label ends up modeling
  auto gap_len = [&]() {
    return g.gap_min_frames +
           static_cast<int>(rng.uniform_int(g.gap_max_frames - g.gap_min_frames + 1));
  };
  std::vector<std::pair<int, int>> runs;  // (phoneme unit or -1 for gap, frames)
  runs.push_back({-1, gap_len()});
  for (size_t i = 0; i < phonemes.size(); ++i) {
    const int copies = g.frames_min +
                       static_cast<int>(rng.uniform_int(g.frames_max - g.frames_min + 1));
    runs.push_back({phonemes[i] - Vocabulary::kNumReserved, copies});
    runs.push_back({-1, gap_len()});
  }
  int total = 0;
  for (const auto& [unit, frames] : runs) total += frames;
  Matrix feats(total, g.num_phonemes);
  int t = 0;
  for (const auto& [unit, frames] : runs) {
    for (int c = 0; c < frames; ++c, ++t) {
      double* row = feats.row(t);
      for (int j = 0; j < g.num_phonemes; ++j) {
        row[j] = (j == unit ? 1.0 : 0.0) + g.noise_sigma * rng.normal();
      }
    }
  }
  return feats;
}

void write_split(const GenConfig& g, const ToyInventory& inv, const std::string& dir,
                 const std::string& name, const Corpus& corpus, uint64_t seed,
                 uint64_t split_tag) {
  save_transcripts(dir + "/" + name + ".txt", corpus);
  std::vector<Utterance> utts;
  utts.reserve(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    const LabelSeq phones =
        generate_phoneme_sequence(corpus[i], inv.lexicon, utterance_phoneme_seed(corpus[i], i));
    Rng frng(mix64(mix64(seed, split_tag), i));
    utts.push_back({name + "-" + zero_pad(static_cast<int>(i), 5),
                    synthesize_features(g, phones, frng)});
  }
  save_feature_archive(dir + "/" + name + ".feats", utts);
}

}  // namespace

uint64_t utterance_phoneme_seed(const Sentence& words, size_t index) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& w : words) {
    h = fnv1a64(w, h);
    h = fnv1a64(" ", h);
  }
  return mix64(h, index);
}

void generate_toy_corpus(const RunConfig& cfg, const std::string& out_dir) {
  const GenConfig& g = cfg.gen;
  std::filesystem::create_directories(out_dir);

  ToyInventory inv = build_inventory(g, cfg.seed);
  inv.lexicon.save(out_dir + "/lexicon.txt");
  inv.lexicon.phoneme_vocab().save(out_dir + "/vocab_phoneme.txt");

  ZipfSampler zipf(g.num_words, g.zipf_exponent);

  auto make_corpus = [&](int n, uint64_t tag, bool allow_oov) {
    Rng rng(mix64(cfg.seed, tag));
    Corpus c;
    for (int i = 0; i < n; ++i) {
      const bool with_oov = allow_oov && rng.uniform01() < g.oov_sentence_fraction;
      c.push_back(sample_sentence(g, inv, zipf, rng, with_oov));
    }
    return c;
  };

  const Corpus train = make_corpus(g.train_utterances, 0x77a1, false);
  const Corpus dev = make_corpus(g.dev_utterances, 0x77a2, true);
  const Corpus test = make_corpus(g.test_utterances, 0x77a3, true);
  const Corpus text = make_corpus(g.text_sentences, 0x77a4, false);
  const Corpus text_dev = make_corpus(g.text_dev_sentences, 0x77a5, false);

  // Extension text: every sentence contains an OOV word, and every OOV word
  // is guaranteed at least min_occurrence occurrences.
  Rng oov_rng(mix64(cfg.seed, 0x77a6));
  Corpus text_oov;
  std::unordered_map<std::string, int> oov_counts;
  for (int i = 0; i < g.oov_text_sentences; ++i) {
    Sentence s = sample_sentence(g, inv, zipf, oov_rng, true);
    for (const auto& w : s) {
      if (!w.empty() && w[0] == 'z') ++oov_counts[w];
    }
    text_oov.push_back(std::move(s));
  }
  for (const auto& w : inv.oov_words) {
    while (oov_counts[w] < g.min_occurrence) {
      Sentence s = sample_sentence(g, inv, zipf, oov_rng, false);
      s[oov_rng.uniform_int(s.size())] = w;
      for (const auto& t : s) {
        if (!t.empty() && t[0] == 'z') ++oov_counts[t];
      }
      text_oov.push_back(std::move(s));
    }
  }

  save_transcripts(out_dir + "/text.txt", text);
  save_transcripts(out_dir + "/text_dev.txt", text_dev);
  save_transcripts(out_dir + "/text_oov.txt", text_oov);

  write_split(g, inv, out_dir, "train", train, cfg.seed, 0xf001);
  write_split(g, inv, out_dir, "dev", dev, cfg.seed, 0xf002);
  write_split(g, inv, out_dir, "test", test, cfg.seed, 0xf003);

  // Working word vocabulary: everything observed in the text and acoustic
  // training data (the designated OOV words are deliberately absent).
  Corpus observed = text;
  observed.insert(observed.end(), train.begin(), train.end());
  cut_vocabulary(observed, 0).save(out_dir + "/vocab_word.txt");

  std::ofstream mf(out_dir + "/manifest.tsv", std::ios::trunc);
  if (!mf) throw DataError("cannot write manifest: " + out_dir);
  mf << "seed\t" << cfg.seed << "\n";
  mf << "config\t" << cfg.hash() << "\n";
  mf << "phonemes\t" << g.num_phonemes << "\n";
  mf << "words\t" << g.num_words << "\n";
  mf << "oov_words\t" << g.num_oov_words << "\n";
  mf << "train\t" << train.size() << "\n";
  mf << "dev\t" << dev.size() << "\n";
  mf << "test\t" << test.size() << "\n";
  mf << "text\t" << text.size() << "\n";
  mf << "text_dev\t" << text_dev.size() << "\n";
  mf << "text_oov\t" << text_oov.size() << "\n";
}

}  // namespace masr
