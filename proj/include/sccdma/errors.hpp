#pragma once

#include <stdexcept>
#include <string>

namespace sccdma {

// Base for every error raised by the library. The CLI maps any of these to a
// nonzero exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IntegrityError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class BracketError : public Error {
public:
    BracketError(const std::string& what, bool lo_ok, bool hi_ok)
        : Error(what), lo_success(lo_ok), hi_success(hi_ok) {}

    bool lo_success;
    bool hi_success;
};

} // namespace sccdma
