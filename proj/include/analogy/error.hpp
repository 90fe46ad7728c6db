#pragma once

#include <stdexcept>
#include <string>

namespace analogy {

// All library failures derive from Error so callers can catch one type.
// kind() is a short stable tag used by the CLI's machine-parsable error line.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
};

// Feature vectors of incompatible lengths.
class DimensionError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "dimension"; }
};

// Malformed input data or a violated dataset invariant.
class DataError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "data"; }
};

// Invalid parameters (k = 0, bad kernel name, inconsistent options, ...).
class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

}  // namespace analogy
