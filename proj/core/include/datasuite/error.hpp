#pragma once

#include <stdexcept>
#include <string>

namespace datasuite {

// Every error carries the module that raised it so the CLI can report
// "[module] message" and pick an exit code from the error category.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error("[" + module + "] " + message), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

// Malformed or inconsistent input data (CSV problems, schema mismatch, empty groups).
class DataError : public Error {
public:
    using Error::Error;
};

// A numerical routine could not produce a usable result.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Invalid parameters or configuration supplied by the caller.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace datasuite
