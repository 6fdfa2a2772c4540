/*
* Copyright (C) 2026 epiforecast contributors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epiforecast {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad argument, wrong series kind, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Malformed CSV row. Carries the 1-based line number of the offending line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Dataset shape problems: empty table, date gaps, duplicate dates.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Value-level invariant violation, e.g. a cumulative count that decreases.
class ValidationError : public Error {
public:
    using Error::Error;
};

class DegenerateScaleError : public Error {
public:
    using Error::Error;
};

/// Rank-deficient least-squares problem.
class SingularFitError : public Error {
public:
    using Error::Error;
};

/// Non-finite loss or objective while fitting.
class DivergenceError : public Error {
public:
    using Error::Error;
};

class ExhaustedGridError : public Error {
public:
    using Error::Error;
};

/// A metric whose denominator vanishes (MAPE with a zero actual, MASE on a flat series, ...).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

class LoadError : public Error {
public:
    using Error::Error;
};

class UnsupportedVersionError : public LoadError {
public:
    using LoadError::LoadError;
};

} // namespace epiforecast
