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

#ifndef MASR_TYPES_HPP_
#define MASR_TYPES_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace masr {

// Unit indices over some vocabulary (phonemes, words, or alignments).
using LabelSeq = std::vector<int32_t>;

// One sentence as raw tokens; a corpus is one sentence per line on disk.
using Sentence = std::vector<std::string>;
using Corpus = std::vector<Sentence>;

}  // namespace masr

#endif  // MASR_TYPES_HPP_
