#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nsfd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (NaN entries, m > 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Result would overflow the floating-point range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Invalid combination of model, scheme and parameters, detected before stepping.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// A step size makes a denominator function vanish.
class StepSizeError : public Error {
public:
    using Error::Error;
};

/// Semi-implicit closed-form solve hit a zero pivot.
class DegenerateStepError : public Error {
public:
    using Error::Error;
};

/// Fixed-point iteration failed to reach its tolerance.
class IterationError : public Error {
public:
    IterationError(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }
    [[nodiscard]] int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// Bad command-line or figure request.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Wraps a stepper failure with the index of the step that raised it.
class StepError : public Error {
public:
    StepError(const std::string& what, std::size_t step) : Error(what), step_(step) {}

    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace nsfd
