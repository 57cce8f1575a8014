// Copyright 2026 The Foveascan Authors.
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

#ifndef FOVEASCAN_ERRORS_HPP
#define FOVEASCAN_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace foveascan {

/// Base of all recoverable runtime errors raised by the library.
/// Programming faults (misuse of the pipeline state machine, broken
/// internal invariants) derive from std::logic_error instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidRangeError : public Error {
public:
    using Error::Error;
};

class OutOfRangeError : public Error {
public:
    using Error::Error;
    OutOfRangeError(const std::string& msg, std::vector<int> offending)
        : Error(msg), offending_indices(std::move(offending)) {}
    std::vector<int> offending_indices;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

class EmptyWindowError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Raised by the cube reader; carries the header key that was missing
/// or could not be parsed.
class MalformedHeaderError : public Error {
public:
    MalformedHeaderError(std::string key_, const std::string& msg)
        : Error(msg), key(std::move(key_)) {}
    std::string key;
};

class GridMismatchError : public Error {
public:
    using Error::Error;
};

class DegenerateConfigurationError : public Error {
public:
    using Error::Error;
};

class InsufficientPointsError : public Error {
public:
    using Error::Error;
};

class InsufficientFiducialsError : public Error {
public:
    using Error::Error;
};

class PointAtInfinityError : public Error {
public:
    using Error::Error;
};

/// Raised when a requested view direction needs tilts beyond the
/// mechanical range. Carries the clamped best-effort tilts.
class UnreachableTargetError : public Error {
public:
    UnreachableTargetError(const std::string& msg, double tx, double ty)
        : Error(msg), clamped_tilt_x_deg(tx), clamped_tilt_y_deg(ty) {}
    double clamped_tilt_x_deg;
    double clamped_tilt_y_deg;
};

class IncompatiblePatchError : public Error {
public:
    using Error::Error;
};

class UnacceptedReportError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// Scenario / manifest / CLI configuration problems. Mapped to exit
/// code 2 by the command line tool.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Pipeline driven with inputs inconsistent with its phase. This is a
/// programming fault, not a runtime condition; the CLI maps it to exit
/// code 3.
class IllegalTransitionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace foveascan

#endif  // FOVEASCAN_ERRORS_HPP
