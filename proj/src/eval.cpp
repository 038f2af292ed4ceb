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

#include "masr/eval.hpp"

#include <cstdio>
#include <sstream>

#include "masr/corpus.hpp"
#include "masr/error.hpp"

namespace masr {

namespace {

void accumulate(WerSubset& s, const EditCounts& c, int64_t ref_tokens) {
  s.sub += c.sub;
  s.ins += c.ins;
  s.del += c.del;
  s.ref_tokens += ref_tokens;
  s.sentences += 1;
}

std::string subset_row(const char* name, const WerSubset& s) {
  char buf[160];
  snprintf(buf, sizeof(buf), "%-5s %8.2f %10lld %8lld %8lld %8lld %8lld\n", name, s.wer(),
           static_cast<long long>(s.ref_tokens), static_cast<long long>(s.sub),
           static_cast<long long>(s.ins), static_cast<long long>(s.del),
           static_cast<long long>(s.sentences));
  return buf;
}

void tsv_row(std::ostringstream& os, const char* name, const WerSubset& s) {
  os << name << "\t" << s.wer() << "\t" << s.ref_tokens << "\t" << s.sub << "\t" << s.ins
     << "\t" << s.del << "\t" << s.sentences << "\n";
}

}  // namespace

WerReport score_corpus(const Corpus& refs, const Corpus& hyps, const Vocabulary* split_vocab) {
  if (refs.size() != hyps.size()) {
    throw DataError("score_corpus: " + std::to_string(refs.size()) + " references vs " +
                    std::to_string(hyps.size()) + " hypotheses");
  }
  WerReport report;
  report.split_present = split_vocab != nullptr;
  for (size_t i = 0; i < refs.size(); ++i) {
    const EditCounts c = edit_distance(refs[i], hyps[i]);
    const int64_t n = static_cast<int64_t>(refs[i].size());
    accumulate(report.all, c, n);
    if (split_vocab) {
      accumulate(sentence_in_vocab(*split_vocab, refs[i]) ? report.ivs : report.oovs, c, n);
    }
  }
  return report;
}

std::string WerReport::to_tsv() const {
  std::ostringstream os;
  os << "subset\twer\tref_tokens\tsub\tins\tdel\tsentences\n";
  tsv_row(os, "all", all);
  if (split_present) {
    tsv_row(os, "ivs", ivs);
    tsv_row(os, "oovs", oovs);
  }
  return os.str();
}

std::string WerReport::to_table() const {
  std::ostringstream os;
  os << "subset    WER ref_tokens      sub      ins      del    sents\n";
  os << subset_row("All", all);
  if (split_present) {
    os << subset_row("IVS", ivs);
    os << subset_row("OOVS", oovs);
  }
  return os.str();
}

}  // namespace masr
