#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bannerscope {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (invalid node id, wrong node kind, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A line-oriented input file could not be parsed; `line()` is 1-based.
class FormatError : public Error {
public:
    FormatError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnknownColor : public Error {
public:
    explicit UnknownColor(const std::string& text)
        : Error("unknown color: '" + text + "'"), text_(text) {}
    const std::string& text() const noexcept { return text_; }

private:
    std::string text_;
};

class InvalidK : public Error {
public:
    using Error::Error;
};

class InsufficientClasses : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class MissingBanner : public Error {
public:
    using Error::Error;
};

/// A page fetch failed; `kind()` is the manifest error code.
class FetchError : public Error {
public:
    FetchError(std::string kind, const std::string& what) : Error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class Timeout : public FetchError {
public:
    explicit Timeout(const std::string& what) : FetchError("timeout", what) {}
};

class DnsFailure : public FetchError {
public:
    explicit DnsFailure(const std::string& what) : FetchError("dns_failure", what) {}
};

class TooManyRedirects : public FetchError {
public:
    explicit TooManyRedirects(const std::string& what) : FetchError("too_many_redirects", what) {}
};

} // namespace bannerscope
