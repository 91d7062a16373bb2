// Copyright 2026 The COSMIC Authors.
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

#include "cosmic/error.hpp"

namespace cosmic {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorCode::kNotAProbability: return "NotAProbability";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyCache: return "EmptyCache";
    case ErrorCode::kMissingQuery: return "MissingQuery";
    case ErrorCode::kNonUnitNode: return "NonUnitNode";
    case ErrorCode::kWrongOrder: return "WrongOrder";
    case ErrorCode::kEmptyCliqueSet: return "EmptyCliqueSet";
    case ErrorCode::kEmptyAfv: return "EmptyAFV";
    case ErrorCode::kEmptyStream: return "EmptyStream";
    case ErrorCode::kInfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kNonUnitVectors: return "NonUnitVectors";
  }
  return "Unknown";
}

}  // namespace cosmic
