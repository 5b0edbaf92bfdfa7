#pragma once

#include <stdexcept>
#include <string>

namespace lmg {

// Base class for all library errors so callers can catch lmg::error.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_argument : error {
    using error::error;
};

struct dimension_mismatch : error {
    using error::error;
};

// Requested problem size exceeds the configured memory/storage policy.
struct resource_error : error {
    using error::error;
};

// A numeric routine failed or produced out-of-domain values.
struct numeric_error : error {
    using error::error;
};

// The Liouvillian kernel is not one-dimensional; carries the detected dimension.
struct degenerate_steady_state : error {
    int nullspace_dim;
    degenerate_steady_state(const std::string& msg, int dim)
        : error(msg), nullspace_dim(dim) {}
};

// Time step violates a stability or drift bound.
struct step_size_error : error {
    using error::error;
};

struct config_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

}  // namespace lmg
