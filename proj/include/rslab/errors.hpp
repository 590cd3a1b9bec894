#ifndef RSLAB_ERRORS_HPP
#define RSLAB_ERRORS_HPP

#include <stdexcept>

namespace rslab {

// Series failed to meet the requested tail bound within the term budget.
struct NonConvergent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Modular parameter with Im(tau) <= 0.
struct InvalidModulus : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation requested at (or numerically on top of) a lattice zero of sigma.
struct PoleAtLatticePoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Coincident particle positions or vanishing sigma factors in a Lax build.
struct SingularConfiguration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Spectral parameter on the zero set of sigma or of a theta denominator.
struct SpectralPole : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Intertwiner inversion with condition estimate beyond the accepted bound.
struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Analytic and finite-difference derivatives disagree in cross-check mode.
struct DerivativeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Degenerate spectral tuple (vanishing right-hand side) in a determinant check.
struct DegenerateTuple : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config text could not be parsed.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config parsed but a value is out of range.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rslab

#endif
