#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace swirl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File system failures: missing files, unwritable paths.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input text or binary data. Carries a line number or byte offset
/// when one is known (0 means unknown).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::uint64_t line = 0, std::uint64_t offset = 0)
        : Error(what), line_(line), offset_(offset) {}

    std::uint64_t line() const noexcept { return line_; }
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t line_;
    std::uint64_t offset_;
};

/// Well-formed input with invalid content (non-finite values, wrong dimension).
class DataError : public Error {
public:
    using Error::Error;
};

/// A precondition on a numeric parameter does not hold.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Non-finite values or failed convergence during a numeric routine.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Missing credentials or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Remote endpoint failed after all retries.
class TransportError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class SplitError : public Error {
public:
    using Error::Error;
};

class GenerationError : public Error {
public:
    GenerationError(const std::string& what, std::uint64_t attempts)
        : Error(what), attempts_(attempts) {}
    std::uint64_t attempts() const noexcept { return attempts_; }

private:
    std::uint64_t attempts_;
};

class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace swirl
