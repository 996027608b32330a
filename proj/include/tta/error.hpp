#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace tta {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed chain expression or set file. `offset` is the byte offset
/// within the offending line; `line` is 1-based (0 when not line-oriented).
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset, std::size_t line = 0)
        : Error(render(message, offset, line)), message_(std::move(message)), offset_(offset), line_(line) {}

    const std::string& message() const noexcept { return message_; }

    std::size_t offset() const noexcept { return offset_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string render(const std::string& message, std::size_t offset, std::size_t line) {
        std::string out;
        if (line != 0) out += "line " + std::to_string(line) + ", ";
        out += "offset " + std::to_string(offset) + ": " + message;
        return out;
    }

    std::string message_;
    std::size_t offset_;
    std::size_t line_;
};

/// Input data violates a precondition (bad image, bad CSV row, inconsistent
/// class counts, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// A metric is undefined for the given input (e.g. AORC on an all-correct
/// vector).
class DegenerateMetricError : public Error {
public:
    using Error::Error;
};

/// Invalid argument combination at the API or command-line level.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace tta
