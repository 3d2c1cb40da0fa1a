// errors.hpp — exception types separating bad user input from numerical-engine failures

#pragma once

#include <stdexcept>
#include <string>

namespace qdeph {

// Caller-side problem: bad parameters, malformed files, unusable settings.
// The CLI maps this family to exit code 2.
struct invalid_input : std::runtime_error {
    explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

// Engine-side problem: a computation that cannot proceed or did not converge.
// The CLI maps this family to exit code 3.
struct engine_error : std::runtime_error {
    explicit engine_error(const std::string& what) : std::runtime_error(what) {}
};

// Closed-form denominator 1 - exp(-2*dv^2/w0^2)*cos(2*dv*q0y) too close to zero;
// callers should fall back to the quadrature engine.
struct degenerate_denominator final : engine_error {
    explicit degenerate_denominator(const std::string& what) : engine_error(what) {}
};

// Iterative fit exhausted its sweep budget or the input cannot constrain the model.
struct non_convergence final : engine_error {
    explicit non_convergence(const std::string& what) : engine_error(what) {}
};

} // namespace qdeph
