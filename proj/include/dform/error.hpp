#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dform {

/// Fault attributable to the caller's input (bad expression, kind mismatch,
/// grid mismatch, ...). The CLI maps it to exit code 1 and the service to
/// HTTP 400. Anything else escaping the library is an internal error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset, std::string token)
        : Error(message + " (at offset " + std::to_string(offset) + ")"),
          message_(std::move(message)),
          offset_(offset),
          token_(std::move(token)) {}

    const std::string& message() const noexcept { return message_; }
    std::size_t offset() const noexcept { return offset_; }
    const std::string& token() const noexcept { return token_; }

private:
    std::string message_;
    std::size_t offset_;
    std::string token_;
};

/// Operation applied to an object of the wrong kind or degree.
class KindError : public Error {
public:
    using Error::Error;
};

}  // namespace dform
