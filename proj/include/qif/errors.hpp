#pragma once

#include <stdexcept>
#include <string>

namespace qif {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument shapes or preconditions violated by the caller.
class ContractViolation : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

/// Raised for odd orders handed to the WZ factorization.
class UnsupportedOrder : public Error {
public:
    using Error::Error;
};

/// A 2x2 pivot block became numerically singular.
class FactorizationBreakdown : public Error {
public:
    using Error::Error;
};

class PartitionError : public Error {
public:
    using Error::Error;
};

/// An iteration hit its cap (or diverged) before meeting its tolerance.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace qif
