#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stokes {

// Base for all toolkit failures. `numerical()` separates convergence failures
// (CLI exit code 2) from input/validation failures (exit code 1).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual bool numerical() const noexcept { return false; }
};

class InvalidGeometryError : public Error { using Error::Error; };
class DegreeError : public Error { using Error::Error; };
class MismatchError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class NormalizationError : public Error { using Error::Error; };
class SingularityError : public Error { using Error::Error; };
class NotACycleError : public Error { using Error::Error; };
class NoInteriorError : public Error { using Error::Error; };
class TooLargeError : public Error { using Error::Error; };
class UnsupportedError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

class NoLimitError : public Error {
public:
    using Error::Error;
    [[nodiscard]] bool numerical() const noexcept override { return true; }
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " at position " + std::to_string(position)), position_(position) {}
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

} // namespace stokes
