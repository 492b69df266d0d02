// Copyright 2026 The slaforge Authors.
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

#include "slaforge/error.hpp"

namespace slaforge {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NonPositiveSlack: return "NonPositiveSlack";
        case ErrorKind::NonPositiveRisk: return "NonPositiveRisk";
        case ErrorKind::NonPositiveTail: return "NonPositiveTail";
        case ErrorKind::NegativeEntry: return "NegativeEntry";
        case ErrorKind::FractionOutOfRange: return "FractionOutOfRange";
        case ErrorKind::NonPositiveSLA: return "NonPositiveSLA";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::WrongDimensions: return "WrongDimensions";
        case ErrorKind::TraceMisaligned: return "TraceMisaligned";
        case ErrorKind::ZeroArrivalPair: return "ZeroArrivalPair";
        case ErrorKind::PointOutsideReference: return "PointOutsideReference";
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::EmptyFile: return "EmptyFile";
        case ErrorKind::UnparseableDate: return "UnparseableDate";
        case ErrorKind::NegativeCapacity: return "NegativeCapacity";
        case ErrorKind::AllRatesZero: return "AllRatesZero";
        case ErrorKind::BoroughWithNoRisk: return "BoroughWithNoRisk";
        case ErrorKind::DidNotConverge: return "DidNotConverge";
        case ErrorKind::NoFeasiblePolicy: return "NoFeasiblePolicy";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_validation_error(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::AllRatesZero:
        case ErrorKind::BoroughWithNoRisk:
        case ErrorKind::DidNotConverge:
        case ErrorKind::NoFeasiblePolicy:
        case ErrorKind::IoError:
            return false;
        default:
            return true;
    }
}

}  // namespace slaforge
