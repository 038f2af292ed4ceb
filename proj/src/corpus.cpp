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

#include "masr/corpus.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "masr/error.hpp"

namespace masr {

Corpus load_transcripts(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read transcript file: " + path);
  Corpus corpus;
  std::string line;
  while (std::getline(f, line)) {
    Sentence s;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) s.push_back(tok);
    corpus.push_back(std::move(s));
  }
  return corpus;
}

void save_transcripts(const std::string& path, const Corpus& corpus) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write transcript file: " + path);
  for (const auto& s : corpus) {
    for (size_t i = 0; i < s.size(); ++i) f << (i ? " " : "") << s[i];
    f << "\n";
  }
}

Vocabulary cut_vocabulary(const Corpus& transcripts, int64_t min_count) {
  std::unordered_map<std::string, int64_t> counts;
  std::vector<std::string> order;
  for (const auto& s : transcripts) {
    for (const auto& w : s) {
      if (counts[w]++ == 0) order.push_back(w);
    }
  }
  std::vector<std::string> kept;
  for (const auto& w : order) {
    if (counts[w] > min_count) kept.push_back(w);
  }
  return Vocabulary::from_units(kept);
}

double oov_rate(const Vocabulary& vocab, const Corpus& transcripts) {
  int64_t total = 0, oov = 0;
  for (const auto& s : transcripts) {
    for (const auto& w : s) {
      ++total;
      if (!vocab.contains(w)) ++oov;
    }
  }
  if (total == 0) throw DataError("oov_rate: corpus has no tokens");
  return 100.0 * static_cast<double>(oov) / static_cast<double>(total);
}

bool sentence_in_vocab(const Vocabulary& vocab, const Sentence& sentence) {
  for (const auto& w : sentence)
    if (!vocab.contains(w)) return false;
  return true;
}

std::pair<Corpus, Corpus> split_ivs_oovs(const Vocabulary& vocab, const Corpus& transcripts) {
  Corpus ivs, oovs;
  for (const auto& s : transcripts) {
    (sentence_in_vocab(vocab, s) ? ivs : oovs).push_back(s);
  }
  return {ivs, oovs};
}

Vocabulary extend_vocabulary(const Vocabulary& base, const Corpus& test_transcripts) {
  Vocabulary out = base;
  for (const auto& s : test_transcripts) {
    for (const auto& w : s) out.add(w);
  }
  return out;
}

namespace {

static_assert(sizeof(double) == 8);

void write_f64_le(std::ostream& os, double v) {
  uint64_t bits = std::bit_cast<uint64_t>(v);
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  os.write(buf, 8);
}

double read_f64_le(std::istream& is) {
  char buf[8];
  is.read(buf, 8);
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_feature_archive(const std::string& path, const std::vector<Utterance>& utts) {
  std::ofstream f(path, std::ios::trunc | std::ios::binary);
  if (!f) throw DataError("cannot write feature archive: " + path);
  for (const auto& u : utts) {
    f << "MET1 " << u.id << " " << u.feats.rows << " " << u.feats.cols << "\n";
    if constexpr (std::endian::native == std::endian::little) {
      f.write(reinterpret_cast<const char*>(u.feats.data.data()),
              static_cast<std::streamsize>(u.feats.data.size() * 8));
    } else {
      for (double v : u.feats.data) write_f64_le(f, v);
    }
  }
}

std::vector<Utterance> load_feature_archive(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read feature archive: " + path);
  std::vector<Utterance> utts;
  std::string header;
  while (std::getline(f, header)) {
    if (header.empty()) continue;
    std::istringstream iss(header);
    std::string magic, id;
    int frames = -1, dim = -1;
    iss >> magic >> id >> frames >> dim;
    if (magic != "MET1" || frames < 0 || dim <= 0) {
      throw DataError("feature archive " + path + ": bad header '" + header + "'");
    }
    Utterance u;
    u.id = id;
    u.feats = Matrix(frames, dim);
    if constexpr (std::endian::native == std::endian::little) {
      f.read(reinterpret_cast<char*>(u.feats.data.data()),
             static_cast<std::streamsize>(u.feats.data.size() * 8));
    } else {
      for (double& v : u.feats.data) v = read_f64_le(f);
    }
    if (!f) throw DataError("feature archive " + path + ": truncated payload for " + id);
    utts.push_back(std::move(u));
  }
  return utts;
}

}  // namespace masr
