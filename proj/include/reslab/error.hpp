#pragma once

#include <stdexcept>
#include <string>

namespace reslab {

/// Base class for every error raised by the library. The message always
/// starts with the name of the module that raised it.
class Error : public std::runtime_error {
public:
    Error(const std::string& module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(module) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Bad input: malformed configuration, invalid geometry, preconditions.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An iterative method failed to converge, or a numerical guard tripped.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace reslab
