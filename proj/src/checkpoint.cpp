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

#include "masr/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "masr/ctc.hpp"
#include "masr/error.hpp"

namespace masr {

using nlohmann::json;

namespace {

Vocabulary vocab_from_full_units(const std::vector<std::string>& units,
                                 const std::string& path) {
  if (units.size() < static_cast<size_t>(Vocabulary::kNumReserved)) {
    throw DataError("checkpoint " + path + ": vocabulary lacks reserved symbols");
  }
  for (int i = 0; i < Vocabulary::kNumReserved; ++i) {
    if (units[i] != Vocabulary::reserved_units()[i]) {
      throw DataError("checkpoint " + path + ": unexpected reserved symbol order");
    }
  }
  return Vocabulary::from_units({units.begin() + Vocabulary::kNumReserved, units.end()});
}

constexpr char kMagic[8] = {'M', 'A', 'S', 'R', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

void write_u32_le(std::ostream& os, uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(buf, 4);
}

void write_u64_le(std::ostream& os, uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(buf, 8);
}

uint32_t read_u32_le(std::istream& is) {
  unsigned char buf[4];
  is.read(reinterpret_cast<char*>(buf), 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(buf[i]) << (8 * i);
  return v;
}

uint64_t read_u64_le(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
  return v;
}

json meta_to_json(const CheckpointMeta& meta) {
  return json{{"stage", to_string(meta.stage)},
              {"psd", {{"lambda", meta.psd.lambda}, {"min_keep", meta.psd.min_keep}}},
              {"seed", meta.seed},
              {"config_hash", meta.config_hash}};
}

CheckpointMeta meta_from_json(const json& j) {
  CheckpointMeta meta;
  meta.stage = stage_from_string(j.at("stage").get<std::string>());
  meta.psd.lambda = j.at("psd").at("lambda").get<double>();
  meta.psd.min_keep = j.at("psd").at("min_keep").get<int>();
  meta.seed = j.at("seed").get<uint64_t>();
  meta.config_hash = j.at("config_hash").get<std::string>();
  return meta;
}

json params_to_json(const ParamStore& ps) {
  json arr = json::array();
  for (const auto& e : ps.entries()) {
    arr.push_back({{"name", e.name}, {"rows", e.value.rows}, {"cols", e.value.cols}});
  }
  return arr;
}

void write_file(const std::string& path, const json& header, const ParamStore& ps) {
  std::ofstream f(path, std::ios::trunc | std::ios::binary);
  if (!f) throw DataError("cannot write checkpoint: " + path);
  const std::string hdr = header.dump();
  f.write(kMagic, 8);
  write_u32_le(f, kVersion);
  write_u64_le(f, hdr.size());
  f.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
  for (const auto& e : ps.entries()) {
    if constexpr (std::endian::native == std::endian::little) {
      f.write(reinterpret_cast<const char*>(e.value.data.data()),
              static_cast<std::streamsize>(e.value.data.size() * 8));
    } else {
      for (double v : e.value.data) write_u64_le(f, std::bit_cast<uint64_t>(v));
    }
  }
  if (!f) throw DataError("checkpoint write failed: " + path);
}

json read_header(std::ifstream& f, const std::string& path) {
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kMagic, 8) != 0) {
    throw DataError("not a checkpoint file: " + path);
  }
  const uint32_t version = read_u32_le(f);
  if (version != kVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const uint64_t len = read_u64_le(f);
  std::string hdr(len, '\0');
  f.read(hdr.data(), static_cast<std::streamsize>(len));
  if (!f) throw DataError("truncated checkpoint header: " + path);
  return json::parse(hdr);
}

// The constructed model must agree exactly with the parameter table before
// the payload is trusted.
void read_payload(std::ifstream& f, const std::string& path, const json& param_table,
                  ParamStore& ps) {
  const auto& entries = ps.entries();
  if (param_table.size() != entries.size()) {
    throw DataError("checkpoint " + path + ": parameter count mismatch");
  }
  for (size_t i = 0; i < entries.size(); ++i) {
    const json& pj = param_table[i];
    if (pj.at("name") != entries[i].name ||
        pj.at("rows").get<int>() != entries[i].value.rows ||
        pj.at("cols").get<int>() != entries[i].value.cols) {
      throw DataError("checkpoint " + path + ": parameter table mismatch at " +
                      entries[i].name);
    }
  }
  for (auto& e : ps.entries()) {
    if constexpr (std::endian::native == std::endian::little) {
      f.read(reinterpret_cast<char*>(e.value.data.data()),
             static_cast<std::streamsize>(e.value.data.size() * 8));
    } else {
      for (double& v : e.value.data) v = std::bit_cast<double>(read_u64_le(f));
    }
  }
  if (!f) throw DataError("truncated checkpoint payload: " + path);
}

}  // namespace

std::string to_string(StageTag stage) {
  switch (stage) {
    case StageTag::kA2p: return "a2p";
    case StageTag::kP2wFresh: return "p2w-fresh";
    case StageTag::kP2wTdi: return "p2w-tdi";
    case StageTag::kP2wFinetuned: return "p2w-finetuned";
    case StageTag::kP2wOovExtended: return "p2w-oov-extended";
  }
  throw DataError("bad stage tag");
}

StageTag stage_from_string(const std::string& s) {
  if (s == "a2p") return StageTag::kA2p;
  if (s == "p2w-fresh") return StageTag::kP2wFresh;
  if (s == "p2w-tdi") return StageTag::kP2wTdi;
  if (s == "p2w-finetuned") return StageTag::kP2wFinetuned;
  if (s == "p2w-oov-extended") return StageTag::kP2wOovExtended;
  throw DataError("unknown stage tag: " + s);
}

std::string to_string(P2wVariant v) { return v == P2wVariant::kCtc ? "ctc" : "s2s"; }

P2wVariant variant_from_string(const std::string& s) {
  if (s == "ctc") return P2wVariant::kCtc;
  if (s == "s2s") return P2wVariant::kS2s;
  throw DataError("unknown p2w variant: " + s);
}

// ---------------------------------------------------------------------------
// P2wModel dispatch

const Vocabulary& P2wModel::word_vocab() const {
  return variant == P2wVariant::kCtc ? ctc->word_vocab : s2s->word_vocab;
}
const Vocabulary& P2wModel::phoneme_vocab() const {
  return variant == P2wVariant::kCtc ? ctc->phoneme_vocab : s2s->phoneme_vocab;
}
ParamStore& P2wModel::params() {
  return variant == P2wVariant::kCtc ? ctc->params : s2s->params;
}
const ParamStore& P2wModel::params() const {
  return variant == P2wVariant::kCtc ? ctc->params : s2s->params;
}

double P2wModel::train_utterance(const Matrix& log_posts, const LabelSeq& words,
                                 bool second_encoder) {
  if (variant == P2wVariant::kCtc) {
    if (second_encoder) throw UnsupportedStrategyError("second encoder requires the s2s variant");
    return ctc->train_utterance(log_posts, words);
  }
  return s2s->train_pair(log_posts, words, second_encoder);
}

double P2wModel::loss(const Matrix& log_posts, const LabelSeq& words) const {
  if (variant == P2wVariant::kCtc) {
    return ctc_loss(ctc->forward(log_posts), words, Vocabulary::kBlank);
  }
  return s2s->loss(log_posts, words);
}

LabelSeq P2wModel::decode(const Matrix& log_posts, int max_len) const {
  return variant == P2wVariant::kCtc ? ctc->decode(log_posts)
                                     : s2s->decode(log_posts, max_len);
}

void P2wModel::extend_words(const Vocabulary& extended, uint64_t seed) {
  if (variant == P2wVariant::kCtc) {
    ctc->extend_words(extended, seed);
  } else {
    s2s->extend_words(extended, seed);
  }
}

P2wModel make_p2w(P2wVariant variant, const Vocabulary& phoneme_vocab,
                  const Vocabulary& word_vocab, const StackArch& stack_arch,
                  const S2sArch& s2s_arch, uint64_t seed) {
  P2wModel m;
  m.variant = variant;
  if (variant == P2wVariant::kCtc) {
    m.ctc = std::make_unique<P2wCtcModel>(
        P2wCtcModel::create(phoneme_vocab, word_vocab, stack_arch, seed));
  } else {
    m.s2s = std::make_unique<P2wS2sModel>(
        P2wS2sModel::create(phoneme_vocab, word_vocab, s2s_arch, seed));
  }
  return m;
}

// ---------------------------------------------------------------------------
// a2p files

void save_a2p_checkpoint(const std::string& path, const A2pModel& model,
                         const CheckpointMeta& meta) {
  json header = meta_to_json(meta);
  header["kind"] = "a2p";
  header["feat_dim"] = model.feat_dim;
  header["stack_arch"] = {{"layers", model.arch.layers},
                          {"hidden", model.arch.hidden},
                          {"bidirectional", model.arch.bidirectional}};
  header["phoneme_vocab"] = model.phoneme_vocab.units();
  header["phoneme_fingerprint"] = model.phoneme_vocab.fingerprint();
  header["params"] = params_to_json(model.params);
  write_file(path, header, model.params);
}

A2pModel load_a2p_checkpoint(const std::string& path, CheckpointMeta* meta) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read checkpoint: " + path);
  json header = read_header(f, path);
  if (header.at("kind") != "a2p") throw DataError(path + " is not an a2p checkpoint");

  StackArch arch{header.at("stack_arch").at("layers").get<int>(),
                 header.at("stack_arch").at("hidden").get<int>(),
                 header.at("stack_arch").at("bidirectional").get<bool>()};
  Vocabulary pv = vocab_from_full_units(
      header.at("phoneme_vocab").get<std::vector<std::string>>(), path);
  A2pModel model = A2pModel::create(header.at("feat_dim").get<int>(), pv, arch, /*seed=*/0);
  read_payload(f, path, header.at("params"), model.params);
  if (meta) *meta = meta_from_json(header);
  return model;
}

// ---------------------------------------------------------------------------
// p2w files

void save_p2w_checkpoint(const std::string& path, const P2wModel& model,
                         const CheckpointMeta& meta) {
  json header = meta_to_json(meta);
  header["kind"] = "p2w";
  header["variant"] = to_string(model.variant);
  header["phoneme_vocab"] = model.phoneme_vocab().units();
  header["word_vocab"] = model.word_vocab().units();
  header["phoneme_fingerprint"] = model.phoneme_vocab().fingerprint();
  header["word_fingerprint"] = model.word_vocab().fingerprint();
  if (model.variant == P2wVariant::kCtc) {
    header["stack_arch"] = {{"layers", model.ctc->arch.layers},
                            {"hidden", model.ctc->arch.hidden},
                            {"bidirectional", model.ctc->arch.bidirectional}};
  } else {
    const S2sArch& a = model.s2s->arch;
    header["s2s_arch"] = {{"enc_layers", a.enc_layers}, {"enc_hidden", a.enc_hidden},
                          {"dec_layers", a.dec_layers}, {"dec_hidden", a.dec_hidden},
                          {"embed_dim", a.embed_dim},   {"attn_dim", a.attn_dim}};
    header["multimodal"] = model.s2s->multimodal;
  }
  header["params"] = params_to_json(model.params());
  write_file(path, header, model.params());
}

P2wModel load_p2w_checkpoint(const std::string& path, CheckpointMeta* meta) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read checkpoint: " + path);
  json header = read_header(f, path);
  if (header.at("kind") != "p2w") throw DataError(path + " is not a p2w checkpoint");

  Vocabulary pv = vocab_from_full_units(
      header.at("phoneme_vocab").get<std::vector<std::string>>(), path);
  Vocabulary wv = vocab_from_full_units(
      header.at("word_vocab").get<std::vector<std::string>>(), path);

  P2wModel model;
  model.variant = variant_from_string(header.at("variant").get<std::string>());
  if (model.variant == P2wVariant::kCtc) {
    StackArch arch{header.at("stack_arch").at("layers").get<int>(),
                   header.at("stack_arch").at("hidden").get<int>(),
                   header.at("stack_arch").at("bidirectional").get<bool>()};
    model.ctc =
        std::make_unique<P2wCtcModel>(P2wCtcModel::create(pv, wv, arch, /*seed=*/0));
    read_payload(f, path, header.at("params"), model.ctc->params);
  } else {
    const json& a = header.at("s2s_arch");
    S2sArch arch{a.at("enc_layers").get<int>(), a.at("enc_hidden").get<int>(),
                 a.at("dec_layers").get<int>(), a.at("dec_hidden").get<int>(),
                 a.at("embed_dim").get<int>(),  a.at("attn_dim").get<int>()};
    model.s2s = std::make_unique<P2wS2sModel>(P2wS2sModel::create(
        pv, wv, arch, /*seed=*/0, header.at("multimodal").get<bool>()));
    read_payload(f, path, header.at("params"), model.s2s->params);
  }
  if (meta) *meta = meta_from_json(header);
  return model;
}

std::string checkpoint_kind(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read checkpoint: " + path);
  json header = read_header(f, path);
  return header.at("kind").get<std::string>();
}

}  // namespace masr
