// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace cpuf {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Memory geometry is zero or otherwise unusable.
class InvalidGeometryError : public Error {
public:
    using Error::Error;
};

/// A memory region falls outside the owning memory's geometry.
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

/// An argument violates an operation's precondition.
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// A bit-vector or byte-sequence has an incompatible length.
class InvalidLengthError : public Error {
public:
    using Error::Error;
};

/// Two challenges carry the same identifier.
class DuplicateIdError : public Error {
public:
    using Error::Error;
};

/// A CRP record refers to a device with different geometry.
class IncompatibleDeviceError : public Error {
public:
    using Error::Error;
};

/// A reconfiguration that changes nothing.
class NoOpError : public Error {
public:
    using Error::Error;
};

/// A match policy that cannot separate genuine from impostor devices.
class PolicyError : public Error {
public:
    using Error::Error;
};

/// Configuration file problem; carries the offending key when known.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::string key = {}, int line = 0)
        : Error(what), key_(std::move(key)), line_(line) {}
    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    std::string key_;
    int line_ = 0;
};

/// A required prior artifact (CRP database, report) does not exist.
class MissingArtifactError : public Error {
public:
    using Error::Error;
};

/// A serialized artifact is corrupt or has an unsupported version.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace cpuf
