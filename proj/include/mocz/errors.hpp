// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mocz {

// Parameter outside the documented domain of an operation.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input sequence too short for the requested processing.
class InsufficientLength : public std::length_error {
public:
    using std::length_error::length_error;
};

// Malformed or inconsistent configuration/scenario file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mocz
