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

#ifndef MASR_CORPUS_HPP_
#define MASR_CORPUS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "masr/matrix.hpp"
#include "masr/types.hpp"
#include "masr/vocab.hpp"

namespace masr {

// Transcript files: one sentence per line, space-separated words.
Corpus load_transcripts(const std::string& path);
void save_transcripts(const std::string& path, const Corpus& corpus);

// Keeps words whose occurrence count is strictly greater than min_count,
// in order of first appearance. Reserved symbols are always present.
Vocabulary cut_vocabulary(const Corpus& transcripts, int64_t min_count);

// 100 * (tokens not in vocab) / (total tokens). Zero tokens is an error.
double oov_rate(const Vocabulary& vocab, const Corpus& transcripts);

bool sentence_in_vocab(const Vocabulary& vocab, const Sentence& sentence);

// Exact partition: a sentence is IVS iff every token is in the vocabulary.
std::pair<Corpus, Corpus> split_ivs_oovs(const Vocabulary& vocab, const Corpus& transcripts);

// Superset of `base` containing every test-set token; base indices are
// unchanged, new words appended in order of first appearance.
Vocabulary extend_vocabulary(const Vocabulary& base, const Corpus& test_transcripts);

// One utterance of a feature archive.
struct Utterance {
  std::string id;
  Matrix feats;  // frames x dim
};

// Feature archive: per utterance a text header `MET1 <utt-id> <frames> <dim>`
// followed by frames*dim little-endian 64-bit floats; utterances concatenated.
std::vector<Utterance> load_feature_archive(const std::string& path);
void save_feature_archive(const std::string& path, const std::vector<Utterance>& utts);

}  // namespace masr

#endif  // MASR_CORPUS_HPP_
