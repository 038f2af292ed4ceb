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

#include "masr/vocab.hpp"

#include <fstream>

#include "masr/error.hpp"
#include "masr/rng.hpp"

namespace masr {

const std::vector<std::string>& Vocabulary::reserved_units() {
  static const std::vector<std::string> kReserved = {"<blank>", "<sos>", "<eos>", "<unk>"};
  return kReserved;
}

Vocabulary::Vocabulary() {
  for (const auto& u : reserved_units()) {
    index_[u] = static_cast<int32_t>(units_.size());
    units_.push_back(u);
  }
}

Vocabulary Vocabulary::from_units(const std::vector<std::string>& units) {
  Vocabulary v;
  for (const auto& u : units) {
    if (v.index_.count(u)) throw DataError("vocabulary: duplicate unit '" + u + "'");
    v.index_[u] = static_cast<int32_t>(v.units_.size());
    v.units_.push_back(u);
  }
  return v;
}

int32_t Vocabulary::add(const std::string& unit) {
  auto it = index_.find(unit);
  if (it != index_.end()) return it->second;
  int32_t id = static_cast<int32_t>(units_.size());
  index_[unit] = id;
  units_.push_back(unit);
  return id;
}

int32_t Vocabulary::find(const std::string& unit) const {
  auto it = index_.find(unit);
  return it == index_.end() ? -1 : it->second;
}

int32_t Vocabulary::find_or_unk(const std::string& unit) const {
  int32_t id = find(unit);
  return id < 0 ? kUnk : id;
}

const std::string& Vocabulary::unit(int32_t index) const {
  if (index < 0 || index >= size()) throw DataError("vocabulary: index out of range");
  return units_[index];
}

std::string Vocabulary::fingerprint() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& u : units_) {
    h = fnv1a64(u, h);
    h = fnv1a64("\n", h);
  }
  char buf[17];
  snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write vocabulary file: " + path);
  for (const auto& u : units_) f << u << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read vocabulary file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) lines.push_back(line);
  if (lines.size() < static_cast<size_t>(kNumReserved)) {
    throw DataError("vocabulary file lacks the reserved symbol block: " + path);
  }
  for (int i = 0; i < kNumReserved; ++i) {
    if (lines[i] != reserved_units()[i]) {
      throw DataError("vocabulary file " + path + ": line " + std::to_string(i) +
                      " must be " + reserved_units()[i]);
    }
  }
  return from_units({lines.begin() + kNumReserved, lines.end()});
}

}  // namespace masr
