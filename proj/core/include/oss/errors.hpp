#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace oss {

/// Base of every error thrown by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed container (bad magic number, inconsistent header).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Payload shorter than its header promises.
class LengthError : public Error {
public:
    using Error::Error;
};

/// A value outside its permitted domain (e.g. label byte > 9).
class RangeError : public Error {
public:
    using Error::Error;
};

/// Invalid argument or violated precondition.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Configuration problem; `field()` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace oss
