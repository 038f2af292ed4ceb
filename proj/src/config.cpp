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

#include "masr/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "masr/error.hpp"
#include "masr/rng.hpp"

namespace masr {

namespace {

enum class Kind { kInt, kDouble, kU64, kBool };

struct Binding {
  const char* key;
  Kind kind;
  void* ptr;
};

std::vector<Binding> bindings(RunConfig& c) {
  return {
      {"seed", Kind::kU64, &c.seed},
      {"gen.num_phonemes", Kind::kInt, &c.gen.num_phonemes},
      {"gen.num_words", Kind::kInt, &c.gen.num_words},
      {"gen.num_oov_words", Kind::kInt, &c.gen.num_oov_words},
      {"gen.word_min_phonemes", Kind::kInt, &c.gen.word_min_phonemes},
      {"gen.word_max_phonemes", Kind::kInt, &c.gen.word_max_phonemes},
      {"gen.polyphone_fraction", Kind::kDouble, &c.gen.polyphone_fraction},
      {"gen.zipf_exponent", Kind::kDouble, &c.gen.zipf_exponent},
      {"gen.train_utterances", Kind::kInt, &c.gen.train_utterances},
      {"gen.dev_utterances", Kind::kInt, &c.gen.dev_utterances},
      {"gen.test_utterances", Kind::kInt, &c.gen.test_utterances},
      {"gen.text_sentences", Kind::kInt, &c.gen.text_sentences},
      {"gen.text_dev_sentences", Kind::kInt, &c.gen.text_dev_sentences},
      {"gen.oov_text_sentences", Kind::kInt, &c.gen.oov_text_sentences},
      {"gen.min_occurrence", Kind::kInt, &c.gen.min_occurrence},
      {"gen.sentence_min_words", Kind::kInt, &c.gen.sentence_min_words},
      {"gen.sentence_max_words", Kind::kInt, &c.gen.sentence_max_words},
      {"gen.frames_min", Kind::kInt, &c.gen.frames_min},
      {"gen.frames_max", Kind::kInt, &c.gen.frames_max},
      {"gen.gap_min_frames", Kind::kInt, &c.gen.gap_min_frames},
      {"gen.gap_max_frames", Kind::kInt, &c.gen.gap_max_frames},
      {"gen.noise_sigma", Kind::kDouble, &c.gen.noise_sigma},
      {"gen.oov_sentence_fraction", Kind::kDouble, &c.gen.oov_sentence_fraction},
      {"a2p.layers", Kind::kInt, &c.a2p_arch.layers},
      {"a2p.hidden", Kind::kInt, &c.a2p_arch.hidden},
      {"a2p.bidirectional", Kind::kBool, &c.a2p_arch.bidirectional},
      {"p2w.layers", Kind::kInt, &c.p2w_arch.layers},
      {"p2w.hidden", Kind::kInt, &c.p2w_arch.hidden},
      {"p2w.bidirectional", Kind::kBool, &c.p2w_arch.bidirectional},
      {"s2s.enc_layers", Kind::kInt, &c.s2s_arch.enc_layers},
      {"s2s.enc_hidden", Kind::kInt, &c.s2s_arch.enc_hidden},
      {"s2s.dec_layers", Kind::kInt, &c.s2s_arch.dec_layers},
      {"s2s.dec_hidden", Kind::kInt, &c.s2s_arch.dec_hidden},
      {"s2s.embed_dim", Kind::kInt, &c.s2s_arch.embed_dim},
      {"s2s.attn_dim", Kind::kInt, &c.s2s_arch.attn_dim},
      {"psd.lambda", Kind::kDouble, &c.psd.lambda},
      {"psd.min_keep", Kind::kInt, &c.psd.min_keep},
      {"train.a2p.epochs", Kind::kInt, &c.train_a2p.epochs},
      {"train.a2p.lr", Kind::kDouble, &c.train_a2p.lr},
      {"train.tdi.epochs", Kind::kInt, &c.train_tdi.epochs},
      {"train.tdi.lr", Kind::kDouble, &c.train_tdi.lr},
      {"train.ft.epochs", Kind::kInt, &c.train_ft.epochs},
      {"train.ft.lr", Kind::kDouble, &c.train_ft.lr},
      {"train.oov.epochs", Kind::kInt, &c.train_oov.epochs},
      {"train.oov.lr", Kind::kDouble, &c.train_oov.lr},
      {"train.oov.rounds", Kind::kInt, &c.oov_rounds},
      {"train.clip_norm", Kind::kDouble, &c.clip_norm},
      {"train.dev_limit", Kind::kInt, &c.dev_limit},
      {"train.require_tdi", Kind::kBool, &c.require_tdi},
      {"decode.max_len", Kind::kInt, &c.max_decode_len},
  };
}

std::string render(const Binding& b) {
  std::ostringstream os;
  switch (b.kind) {
    case Kind::kInt: os << *static_cast<int*>(b.ptr); break;
    case Kind::kDouble: os << *static_cast<double*>(b.ptr); break;
    case Kind::kU64: os << *static_cast<uint64_t*>(b.ptr); break;
    case Kind::kBool: os << (*static_cast<bool*>(b.ptr) ? 1 : 0); break;
  }
  return os.str();
}

void assign(const Binding& b, const std::string& value) {
  try {
    switch (b.kind) {
      case Kind::kInt: *static_cast<int*>(b.ptr) = std::stoi(value); break;
      case Kind::kDouble: *static_cast<double*>(b.ptr) = std::stod(value); break;
      case Kind::kU64: *static_cast<uint64_t*>(b.ptr) = std::stoull(value); break;
      case Kind::kBool:
        *static_cast<bool*>(b.ptr) = (value == "1" || value == "true" || value == "yes");
        break;
    }
  } catch (const std::exception&) {
    throw DataError(std::string("config: bad value for ") + b.key + ": '" + value + "'");
  }
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const Binding& b : bindings(*this)) {
    if (key == b.key) {
      assign(b, value);
      return;
    }
  }
  throw DataError("config: unknown key '" + key + "'");
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw DataError("config " + path + ":" + std::to_string(lineno) +
                      ": expected key=value");
    }
    set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

RunConfig RunConfig::from_file(const std::string& path) {
  RunConfig c;
  c.load_file(path);
  return c;
}

std::string RunConfig::canonical() const {
  auto& self = const_cast<RunConfig&>(*this);
  std::vector<std::pair<std::string, std::string>> kv;
  for (const Binding& b : bindings(self)) kv.push_back({b.key, render(b)});
  std::sort(kv.begin(), kv.end());
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << "=" << v << "\n";
  return os.str();
}

std::string RunConfig::hash() const {
  char buf[17];
  snprintf(buf, sizeof(buf), "%016llx",
           static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

}  // namespace masr
