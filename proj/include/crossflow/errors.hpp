#pragma once

#include <stdexcept>
#include <string>

namespace crossflow {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad config file, rejected key, invalid parameter combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// API misuse: dimension mismatch, non-positive duration, empty required input.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Filesystem / serialization failure: unreadable corpus file, corrupt index, bad fixture.
class IoError : public Error {
public:
    using Error::Error;
};

/// Completion backend failure. `retryable()` distinguishes transient transport/server
/// conditions from permanent ones (bad request, malformed payload).
class BackendError : public Error {
public:
    BackendError(const std::string& what, bool retryable)
        : Error(what), retryable_(retryable) {}

    bool retryable() const noexcept { return retryable_; }

private:
    bool retryable_ = false;
};

}  // namespace crossflow
