#pragma once

#include <stdexcept>
#include <string>

namespace citnet {

enum class ErrorKind {
    not_found,
    format,
    precondition,
    contract,
    io,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::format: return "format";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::contract: return "contract";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

/// Base of every error raised by the engine. The kind drives the HTTP status
/// in the service and the exit code in the CLI.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& what) : Error(ErrorKind::not_found, what) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(ErrorKind::format, what) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what) : Error(ErrorKind::precondition, what) {}
};

class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error(ErrorKind::contract, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

} // namespace citnet
