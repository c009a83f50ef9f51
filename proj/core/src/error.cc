// Copyright 2026 The fairbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairbound/error.h"

namespace fairbound {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kZeroConditioningMass:
      return "ZeroConditioningMass";
    case ErrorCode::kSupportMismatch:
      return "SupportMismatch";
    case ErrorCode::kEmptyDataset:
      return "EmptyDataset";
    case ErrorCode::kEmptyFeasibleSet:
      return "EmptyFeasibleSet";
    case ErrorCode::kOutOfBox:
      return "OutOfBox";
    case ErrorCode::kInfeasiblePoint:
      return "InfeasiblePoint";
    case ErrorCode::kZeroGroupMass:
      return "ZeroGroupMass";
    case ErrorCode::kAllValuesFiltered:
      return "AllValuesFiltered";
    case ErrorCode::kSchemaMismatch:
      return "SchemaMismatch";
    case ErrorCode::kNonFiniteLikelihood:
      return "NonFiniteLikelihood";
    case ErrorCode::kUnknownVariable:
      return "UnknownVariable";
    case ErrorCode::kDomainMismatch:
      return "DomainMismatch";
    case ErrorCode::kDegenerateResult:
      return "DegenerateResult";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kUnknownCategory:
      return "UnknownCategory";
    case ErrorCode::kInsufficientRows:
      return "InsufficientRows";
    case ErrorCode::kUndefinedMetric:
      return "UndefinedMetric";
    case ErrorCode::kOverflow:
      return "Overflow";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

void ThrowError(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fairbound
