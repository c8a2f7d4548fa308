#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ospring {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The recycled cavity sits on (or numerically at) a pole: |D| below threshold.
class DegenerateResonance : public Error {
public:
    explicit DegenerateResonance(double magnitude)
        : Error("degenerate resonance: |D| = " + std::to_string(magnitude) + " is below 1e-14"),
          magnitude_(magnitude) {}
    double magnitude() const noexcept { return magnitude_; }

private:
    double magnitude_;
};

class SingularMatrix : public Error {
public:
    explicit SingularMatrix(double det)
        : Error("singular 2x2 matrix: |det| = " + std::to_string(det)) {}
};

/// The dark-fringe condition has no solution for the given membrane/beamsplitter.
class NoDarkPort : public Error {
public:
    using Error::Error;
};

class DegenerateLeadingCoefficient : public Error {
public:
    DegenerateLeadingCoefficient() : Error("characteristic polynomial: leading coefficient vanishes") {}
};

/// Malformed configuration text.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed configuration with an invalid value or a missing key.
class ValidationError : public Error {
public:
    ValidationError(std::string key, const std::string& what)
        : Error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

} // namespace ospring
