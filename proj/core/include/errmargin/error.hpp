// Copyright 2026 The errmargin Authors
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

#ifndef ERRMARGIN_ERROR_HPP
#define ERRMARGIN_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace errmargin {

enum class ErrorCode {
    NotNormalizable,
    LinearlyDependent,
    DegeneratePrior,
    MarginOutOfRange,
    DegenerateDirection,
    OutOfDomain,
    MarginZeroDegenerate,
    DimensionMismatch,
    DimensionUnsupported,
    NotAState,
    InvalidConfig,
    ParseError,
};

std::string_view to_string(ErrorCode code);

/// Thrown for every rejected precondition. `code()` identifies which one.
class Error : public std::invalid_argument {
   public:
    Error(ErrorCode code, const std::string &message)
        : std::invalid_argument(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

   private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotNormalizable:
            return "NotNormalizable";
        case ErrorCode::LinearlyDependent:
            return "LinearlyDependent";
        case ErrorCode::DegeneratePrior:
            return "DegeneratePrior";
        case ErrorCode::MarginOutOfRange:
            return "MarginOutOfRange";
        case ErrorCode::DegenerateDirection:
            return "DegenerateDirection";
        case ErrorCode::OutOfDomain:
            return "OutOfDomain";
        case ErrorCode::MarginZeroDegenerate:
            return "MarginZeroDegenerate";
        case ErrorCode::DimensionMismatch:
            return "DimensionMismatch";
        case ErrorCode::DimensionUnsupported:
            return "DimensionUnsupported";
        case ErrorCode::NotAState:
            return "NotAState";
        case ErrorCode::InvalidConfig:
            return "InvalidConfig";
        case ErrorCode::ParseError:
            return "ParseError";
    }
    return "Unknown";
}

}  // namespace errmargin

#endif  // ERRMARGIN_ERROR_HPP
