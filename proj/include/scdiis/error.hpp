/*
 * Copyright 2026 The scdiis Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scdiis {

/// Failure categories shared by the C++ core and the C API.  The numeric
/// values are part of the C ABI (see scdiis.h) and must not be reordered.
enum class ErrorCode : int {
    Ok = 0,
    InvalidArgument = 1,
    DimensionMismatch = 2,
    LinearDependence = 3,
    DegenerateInput = 4,
    FermiDegeneracy = 5,
    NoConvergence = 6,
    SingularDiisSystem = 7,
    PredictorFailure = 8,
    GenerationExhausted = 9,
    EmptyDataset = 10,
    SpeciesMismatch = 11,
    InsufficientData = 12,
    NumericalBlowup = 13,
    IoError = 14,
    ParseError = 15,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace scdiis
