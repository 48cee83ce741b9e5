#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graphon_spectra {

// Every failure the library raises derives from Error so callers (notably the
// CLI) can map categories onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A size limit (tree enumeration cap, dense eigensolver cap) was exceeded.
class SizeError : public Error {
public:
    using Error::Error;
};

// Input data violated a documented invariant (asymmetric profile, bad fractions, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

class MalformedWordError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A kernel lacks the bipartite block structure required by the Gram routines.
class StructureError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Argument outside the mathematical domain (Im z <= 0, coordinate outside [0,1]).
class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double last_residual, std::size_t iterations)
        : Error(what), last_residual_(last_residual), iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    std::size_t iterations_;
};

}  // namespace graphon_spectra
