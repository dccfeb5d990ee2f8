// Copyright 2026 The gain-index Authors. All rights reserved.
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

#include "uoi/error.hpp"

namespace uoi {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kNotStochastic: return "NotStochastic";
    case ErrorKind::kReducible: return "Reducible";
    case ErrorKind::kPeriodic: return "Periodic";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::kTruncationTooDeep: return "TruncationTooDeep";
    case ErrorKind::kSingularSystem: return "SingularSystem";
    case ErrorKind::kMultichainPolicy: return "MultichainPolicy";
    case ErrorKind::kNoConvergence: return "NoConvergence";
    case ErrorKind::kMaxItersExceeded: return "MaxItersExceeded";
    case ErrorKind::kInfeasiblePolicy: return "InfeasiblePolicy";
    case ErrorKind::kStateSpaceTooLarge: return "StateSpaceTooLarge";
  }
  return "Unknown";
}

}  // namespace uoi
