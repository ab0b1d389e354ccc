#pragma once

#include <stdexcept>
#include <string>

namespace hypersona {

// Base error for all library failures.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data (bad label strings, broken dataset lines, ...).
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

// Violated precondition or invalid configuration.
struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// File or service I/O failure.
struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace hypersona
