#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crowdrank {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number (0 when unknown).
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what),
          source_(std::move(source)),
          line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

/// Input violates a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A computation has no meaningful result for this input
/// (zero variance, single-point bandwidth, nothing to score).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

}  // namespace crowdrank
