#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edgegov {

/// A precondition on a numeric argument was violated.
class DomainError : public std::domain_error {
public:
    DomainError(std::string parameter, const std::string& what)
        : std::domain_error(parameter + ": " + what), parameter_(std::move(parameter)) {}

    const std::string& parameter() const noexcept { return parameter_; }

private:
    std::string parameter_;
};

/// Malformed wire message. offset is the 0-based byte position of the fault.
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(std::size_t offset, const std::string& what)
        : std::runtime_error("protocol error at offset " + std::to_string(offset) + ": " + what),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// File content does not match the expected schema.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure; the message carries the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace edgegov
