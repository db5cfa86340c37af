// Copyright 2026 The ckg-lab Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ckg {

enum class ErrorKind {
    // matrix_core
    NonHermitianInput,
    ConvergenceFailure,
    NotAState,
    DimensionMismatch,
    // hamiltonian_zoo
    BadSize,
    DimensionTooLarge,
    InfeasibleDegree,
    GenerationFailure,
    // jump_ensembles
    BadM,
    NotAdjointClosed,
    // filter_kernels
    ModeMismatch,
    BadParameter,
    // lindblad_builder
    InvariantViolation,
    CrossCheckFailure,
    SingularWeight,
    // gap_analysis
    NotDetailedBalanced,
    NotGenerator,
    SparseChain,
    ZeroGap,
    // experiments
    InsufficientData,
    NonPositiveValue,
    MissingColumn,
    ParseError,
    IoError,
};

constexpr std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::NonHermitianInput: return "NonHermitianInput";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::NotAState: return "NotAState";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BadSize: return "BadSize";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::InfeasibleDegree: return "InfeasibleDegree";
    case ErrorKind::GenerationFailure: return "GenerationFailure";
    case ErrorKind::BadM: return "BadM";
    case ErrorKind::NotAdjointClosed: return "NotAdjointClosed";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::BadParameter: return "BadParameter";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::CrossCheckFailure: return "CrossCheckFailure";
    case ErrorKind::SingularWeight: return "SingularWeight";
    case ErrorKind::NotDetailedBalanced: return "NotDetailedBalanced";
    case ErrorKind::NotGenerator: return "NotGenerator";
    case ErrorKind::SparseChain: return "SparseChain";
    case ErrorKind::ZeroGap: return "ZeroGap";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NonPositiveValue: return "NonPositiveValue";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Process exit codes used by the command-line runner.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitInvariant = 2,
    kExitNumerical = 3,
};

constexpr int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::SingularWeight:
    case ErrorKind::ZeroGap:
    case ErrorKind::GenerationFailure:
        return kExitNumerical;
    case ErrorKind::NonHermitianInput:
    case ErrorKind::NotAState:
    case ErrorKind::NotAdjointClosed:
    case ErrorKind::InvariantViolation:
    case ErrorKind::CrossCheckFailure:
    case ErrorKind::NotDetailedBalanced:
    case ErrorKind::NotGenerator:
    case ErrorKind::SparseChain:
        return kExitInvariant;
    default:
        return kExitUsage;
    }
}

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what),
          kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
    throw Error(kind, what);
}

} // namespace ckg
