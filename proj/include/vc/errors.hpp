#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vc {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Kernel evaluation and admissibility.
struct SingularAtDiagonal : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct VarianceMatchedUndefined : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct SingularKernelRejected : Error { using Error::Error; };

// Coefficients and measures.
struct DimensionMismatch : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct MeasureRequired : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };

// Simulation and experiments.
struct AdmissibilityError : Error { using Error::Error; };
struct ReferenceTooSmall : Error { using Error::Error; };
struct InsufficientPaths : Error { using Error::Error; };
struct InvalidDiagnostic : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct NonPositiveEpsilon : Error { using Error::Error; };

// Yamada-Watanabe construction.
struct XiOutOfRange : Error { using Error::Error; };
struct InfeasibleBound : Error { using Error::Error; };

// A non-finite state value; carries the first offending (path, node).
struct NonFiniteState : Error {
    std::size_t path;
    std::size_t node;
    NonFiniteState(std::size_t i, std::size_t k, const std::string& msg)
        : Error(msg), path(i), node(k) {}
};

// Picard iteration ran out of iterations; carries the gap history.
struct NotConverged : Error {
    std::vector<double> gap_history;
    NotConverged(std::vector<double> gaps, const std::string& msg)
        : Error(msg), gap_history(std::move(gaps)) {}
};

}  // namespace vc
