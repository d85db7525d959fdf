#ifndef KDVEXP_ERRORS_HPP
#define KDVEXP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kdvexp {

// Thrown when two fields on different grids are combined or compared.
struct GridMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a real-valued result is requested from coefficients that are
// not conjugate-symmetric within tolerance.
struct SymmetryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a stepper that requires zero-mean data receives a state whose
// zero mode is not (numerically) zero.
struct MeanViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an evolution produces a non-finite coefficient.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, long step) : std::runtime_error(what), step_index(step) {}
    long step_index;
};

// Thrown when adaptive quadrature cannot reach the requested tolerance.
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a slope fit is requested on unusable data (fewer than two
// points, or non-positive errors that have no logarithm).
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on malformed or invalid run configuration; carries the line number
// (1-based) for file input, or 0 when the problem is not tied to a line.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& what, int line_no = 0) : std::runtime_error(what), line(line_no) {}
    int line;
};

} // namespace kdvexp

#endif
