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

#include "acbo/error.h"

namespace acbo {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kDanglingParent: return "DanglingParent";
    case ErrorCode::kRewardHasChildren: return "RewardHasChildren";
    case ErrorCode::kInvalidTopoOrder: return "InvalidTopoOrder";
    case ErrorCode::kInvalidActionInput: return "InvalidActionInput";
    case ErrorCode::kInvalidProfile: return "InvalidProfile";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kCholeskyFailure: return "CholeskyFailure";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::kGraphTooLarge: return "GraphTooLarge";
    case ErrorCode::kRewardOutOfRange: return "RewardOutOfRange";
    case ErrorCode::kGridTooLarge: return "GridTooLarge";
    case ErrorCode::kZeroBaseGradient: return "ZeroBaseGradient";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kUnknownEnvironment: return "UnknownEnvironment";
    case ErrorCode::kInvalidDepot: return "InvalidDepot";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kMissingCovariate: return "MissingCovariate";
    case ErrorCode::kActionSpaceTooLarge: return "ActionSpaceTooLarge";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace acbo
