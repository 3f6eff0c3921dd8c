#ifndef PULSALOOP_ERROR_HPP
#define PULSALOOP_ERROR_HPP

/**
 * @file error.hpp
 * @brief Exception hierarchy shared by all pulsaloop modules.
 *
 * Every error thrown by the library derives from pulsaloop::error so callers
 * (the CLI in particular) can map a failure class onto an exit code.
 */

#include <stdexcept>
#include <string>

namespace pulsaloop {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter violates a documented precondition or type invariant.
class invalid_parameter : public error {
public:
    using error::error;
};

/// An argument lies outside the declared validity range of an algorithm.
class out_of_range : public error {
public:
    using error::error;
};

/// A Gaussian with zero variance was passed where a density is required.
class degenerate_distribution : public error {
public:
    using error::error;
};

/// Quadrature did not converge or a similar numerical failure.
class numerical_error : public error {
public:
    using error::error;
};

/// Malformed configuration; the message carries the offending key path.
class config_error : public error {
public:
    using error::error;
};

/// The scenario violates a hard dispersive-regime condition.
class regime_error : public error {
public:
    using error::error;
};

/// Inputs to a comparison are incompatible (e.g. different time grids).
class grid_mismatch : public error {
public:
    using error::error;
};

class io_error : public error {
public:
    using error::error;
};

}  // namespace pulsaloop

#endif  // PULSALOOP_ERROR_HPP
