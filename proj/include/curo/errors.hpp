// Copyright 2026 The Curo Authors
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

namespace curo {

/// Base class for all domain errors. Each error carries a stable
/// machine-readable code used by the CLI when emitting error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class NotSquare : public Error {
public:
    explicit NotSquare(const std::string& msg) : Error("not_square", msg) {}
};

class NotSymmetric : public Error {
public:
    explicit NotSymmetric(const std::string& msg) : Error("not_symmetric", msg) {}
};

class NotPsd : public Error {
public:
    explicit NotPsd(const std::string& msg) : Error("not_psd", msg) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error("dimension_mismatch", msg) {}
};

class HorizonTooLarge : public Error {
public:
    explicit HorizonTooLarge(const std::string& msg) : Error("horizon_too_large", msg) {}
};

class ModeUnsupportedForDimension : public Error {
public:
    explicit ModeUnsupportedForDimension(const std::string& msg)
        : Error("mode_unsupported_for_dimension", msg) {}
};

class LpInfeasible : public Error {
public:
    explicit LpInfeasible(const std::string& msg) : Error("lp_infeasible", msg) {}
};

class LpUnbounded : public Error {
public:
    explicit LpUnbounded(const std::string& msg) : Error("lp_unbounded", msg) {}
};

class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& msg) : Error("numerical_failure", msg) {}
};

class CutLimitExceeded : public Error {
public:
    explicit CutLimitExceeded(const std::string& msg) : Error("cut_limit_exceeded", msg) {}
};

class InfeasibleMomentSet : public Error {
public:
    explicit InfeasibleMomentSet(const std::string& msg)
        : Error("infeasible_moment_set", msg) {}
};

class BadInput : public Error {
public:
    explicit BadInput(const std::string& msg) : Error("bad_input", msg) {}
};

}  // namespace curo
