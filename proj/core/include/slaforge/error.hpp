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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slaforge {

enum class ErrorKind {
    // Input validation.
    DimensionMismatch,
    NonPositiveSlack,
    NonPositiveRisk,
    NonPositiveTail,
    NegativeEntry,
    FractionOutOfRange,
    NonPositiveSLA,
    InvalidConfig,
    WrongDimensions,
    TraceMisaligned,
    ZeroArrivalPair,
    PointOutsideReference,
    MalformedRow,
    EmptyFile,
    UnparseableDate,
    NegativeCapacity,
    // Degenerate problems and runtime failures.
    AllRatesZero,
    BoroughWithNoRisk,
    DidNotConverge,
    NoFeasiblePolicy,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for kinds caused by bad user input (CLI exit code 2); the rest are
/// runtime failures (exit code 3).
bool is_validation_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace slaforge
