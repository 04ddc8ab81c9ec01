#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spikit {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed textual input. offset is a byte offset into the parsed text.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// A configured size bound was exceeded (frames, algebras, enumerations).
class CapError : public Error {
public:
    using Error::Error;
};

// A precondition of an operation does not hold for the given input.
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace spikit
