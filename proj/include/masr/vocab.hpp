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

#ifndef MASR_VOCAB_HPP_
#define MASR_VOCAB_HPP_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "masr/types.hpp"

namespace masr {

// Ordered unit inventory. The four reserved symbols always occupy the lowest
// indices in this fixed order: blank (CTC), sos/eos (S2S delimiters), unk.
// Immutable once built in practice; extension appends and never re-indexes.
class Vocabulary {
 public:
  static constexpr int32_t kBlank = 0;
  static constexpr int32_t kSos = 1;
  static constexpr int32_t kEos = 2;
  static constexpr int32_t kUnk = 3;
  static constexpr int32_t kNumReserved = 4;

  static const std::vector<std::string>& reserved_units();

  Vocabulary();  // reserved symbols only

  // Appends units after the reserved block; duplicates are an error.
  static Vocabulary from_units(const std::vector<std::string>& units);

  // Appends if absent; returns the unit's index either way.
  int32_t add(const std::string& unit);

  int32_t find(const std::string& unit) const;  // -1 when absent
  int32_t find_or_unk(const std::string& unit) const;
  bool contains(const std::string& unit) const { return find(unit) >= 0; }
  const std::string& unit(int32_t index) const;
  int32_t size() const { return static_cast<int32_t>(units_.size()); }
  const std::vector<std::string>& units() const { return units_; }

  // FNV-1a over the unit list; used as the checkpoint compatibility key.
  std::string fingerprint() const;

  // One unit per line, line number = index.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  bool operator==(const Vocabulary& o) const { return units_ == o.units_; }

 private:
  std::vector<std::string> units_;
  std::unordered_map<std::string, int32_t> index_;
};

}  // namespace masr

#endif  // MASR_VOCAB_HPP_
