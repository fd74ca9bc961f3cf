#pragma once

#include <stdexcept>
#include <string>

namespace scholarlens {

/// Base of every error this library throws. `kind()` is the stable name used
/// in HTTP error bodies and CLI diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error("ParseError", "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                  ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Carries the offending identifier (class id, source id, column name, ...).
class NamedError : public Error {
public:
    NamedError(std::string kind, std::string name, const std::string& message)
        : Error(std::move(kind), message), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class CycleError : public NamedError {
public:
    explicit CycleError(std::string node)
        : NamedError("CycleError", node, "subclass cycle through '" + node + "'") {}
};

class DanglingParentError : public NamedError {
public:
    explicit DanglingParentError(std::string id)
        : NamedError("DanglingParentError", id, "parent class '" + id + "' is not declared") {}
};

class DuplicateIdError : public NamedError {
public:
    explicit DuplicateIdError(std::string id)
        : NamedError("DuplicateIdError", id, "class '" + id + "' declared more than once") {}
};

class UnknownClassError : public NamedError {
public:
    explicit UnknownClassError(std::string id)
        : NamedError("UnknownClassError", id, "unknown class '" + id + "'") {}
};

class EmptyQueryError : public Error {
public:
    EmptyQueryError() : Error("EmptyQueryError", "query is empty after normalization") {}
};

class RuleCompileError : public Error {
public:
    explicit RuleCompileError(const std::string& message) : Error("RuleCompileError", message) {}
};

class UnsupportedMediaError : public Error {
public:
    explicit UnsupportedMediaError(const std::string& message)
        : Error("UnsupportedMediaError", message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("ConfigError", message) {}
};

class TimeoutError : public Error {
public:
    explicit TimeoutError(const std::string& message) : Error("TimeoutError", message) {}
};

class HttpStatusError : public Error {
public:
    HttpStatusError(int status, const std::string& url)
        : Error("HttpStatusError", "HTTP " + std::to_string(status) + " for " + url), status_(status) {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

class NetworkError : public Error {
public:
    explicit NetworkError(const std::string& message) : Error("NetworkError", message) {}
};

class CacheError : public Error {
public:
    explicit CacheError(const std::string& message) : Error("CacheError", message) {}
};

class UnknownSourceError : public NamedError {
public:
    explicit UnknownSourceError(std::string id)
        : NamedError("UnknownSourceError", id, "unknown source '" + id + "'") {}
};

class UnknownColumnError : public NamedError {
public:
    explicit UnknownColumnError(std::string column)
        : NamedError("UnknownColumnError", column, "unknown table column '" + column + "'") {}
};

class InvalidRequestError : public Error {
public:
    explicit InvalidRequestError(const std::string& message) : Error("InvalidRequestError", message) {}
};

}  // namespace scholarlens
