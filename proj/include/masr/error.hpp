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

#ifndef MASR_ERROR_HPP_
#define MASR_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace masr {

// Process exit codes used by the CLI. Library exceptions carry the code they
// map onto so commands can translate uniformly.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kData = 3,
  kStage = 4,
  kNumeric = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

// Shape mismatch in a numeric kernel.
struct DimensionError : Error {
  explicit DimensionError(const std::string& msg) : Error(ExitCode::kData, msg) {}
};

// Malformed or missing input data (files, corpora, vocabularies).
struct DataError : Error {
  explicit DataError(const std::string& msg) : Error(ExitCode::kData, msg) {}
};

// A word required by phoneme generation is absent from the lexicon.
struct LexiconGapError : Error {
  explicit LexiconGapError(const std::string& msg) : Error(ExitCode::kData, msg) {}
};

// CTC target cannot be aligned to the input length. Distinct from numeric
// failure: the instance is well-formed but has an empty alignment set.
struct InfeasibleTargetError : Error {
  explicit InfeasibleTargetError(const std::string& msg)
      : Error(ExitCode::kData, msg) {}
};

// The brute-force CTC oracle was asked for an instance above its size guard.
struct OracleScaleError : Error {
  explicit OracleScaleError(const std::string& msg) : Error(ExitCode::kData, msg) {}
};

// Workflow-stage precondition violated (e.g. decoding an untrained model).
struct StageError : Error {
  explicit StageError(const std::string& msg) : Error(ExitCode::kStage, msg) {}
};

// Non-finite values where finite ones are required (losses, gradients).
struct NumericError : Error {
  explicit NumericError(const std::string& msg) : Error(ExitCode::kNumeric, msg) {}
};

// grad_check probe point produced a non-finite loss.
struct ProbeError : Error {
  explicit ProbeError(const std::string& msg) : Error(ExitCode::kNumeric, msg) {}
};

// Strategy not defined for the requested model variant.
struct UnsupportedStrategyError : Error {
  explicit UnsupportedStrategyError(const std::string& msg)
      : Error(ExitCode::kUsage, msg) {}
};

}  // namespace masr

#endif  // MASR_ERROR_HPP_
