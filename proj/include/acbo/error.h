// Copyright 2026 The Authors.
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

#ifndef ACBO_ERROR_H_
#define ACBO_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace acbo {

enum class ErrorCode {
  kOk = 0,
  // Graph structure.
  kCycleDetected,
  kDanglingParent,
  kRewardHasChildren,
  kInvalidTopoOrder,
  kInvalidActionInput,
  // Simulation.
  kInvalidProfile,
  kArityMismatch,
  // GP.
  kDimensionMismatch,
  kCholeskyFailure,
  kInvalidArgument,
  // Oracle.
  kNonFiniteObjective,
  kGraphTooLarge,
  // Multiplicative weights.
  kRewardOutOfRange,
  // Submodularity tooling.
  kGridTooLarge,
  kZeroBaseGradient,
  // Environments.
  kIndexOutOfRange,
  kUnknownEnvironment,
  kInvalidDepot,
  kMalformedRow,
  kMissingCovariate,
  // Harness.
  kActionSpaceTooLarge,
  kInvalidConfig,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as this exception type; code() identifies
// the failure class listed in the module contracts.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Non-throwing result used by validators.
struct Status {
  ErrorCode code = ErrorCode::kOk;
  std::string message;

  bool ok() const { return code == ErrorCode::kOk; }
  static Status Ok() { return {}; }
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace acbo

#endif  // ACBO_ERROR_H_
