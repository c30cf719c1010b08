// Core value types shared across the library: domains, spectral parameter,
// and the error hierarchy. Numeric failures and usage failures are kept on
// separate branches so callers (in particular the CLI) can map them to
// distinct exit codes.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qbound {

using cd = std::complex<double>;

enum class Domain { HalfLine, UnitInterval };

inline int boundary_count(Domain d) {
    return d == Domain::HalfLine ? 1 : 2;
}

inline const char* domain_name(Domain d) {
    return d == Domain::HalfLine ? "halfline" : "interval";
}

inline bool in_domain(Domain d, double x) {
    if (d == Domain::HalfLine) return x >= 0.0;
    return x >= 0.0 && x <= 1.0;
}

// Spectral parameter z of the resolvent (z + H)^{-1}, H = -(1/2) d^2/dx^2.
// s = sqrt(2z) on the principal branch, so Re s >= 0 away from the cut.
struct SpectralParameter {
    cd z;
    SpectralParameter(cd zz) : z(zz) {}
    SpectralParameter(double zz) : z(zz, 0.0) {}
    cd s() const { return std::sqrt(2.0 * z); }
};

// Distance from z to the ray (-inf, 0], where the Neumann background has its
// spectrum. Used for pole-proximity guards.
inline double distance_to_negative_axis(cd z) {
    if (z.real() <= 0.0) return std::abs(z.imag());
    return std::abs(z);
}

struct Error : std::runtime_error {
    explicit Error(const std::string& m) : std::runtime_error(m) {}
};

// Bad inputs: unknown flags, malformed bc strings, wrong domain, methods that
// do not exist for the requested bc. CLI exit code 1.
struct UsageError : Error {
    explicit UsageError(const std::string& m) : Error(m) {}
};

// A numerical procedure could not meet its contract. CLI exit code 2.
struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error(m) {}
};

struct IncompatibleDomainError : UsageError {
    explicit IncompatibleDomainError(const std::string& m) : UsageError(m) {}
};
struct NonUnitaryError : UsageError {
    explicit NonUnitaryError(const std::string& m) : UsageError(m) {}
};
struct NoClosedFormError : UsageError {
    explicit NoClosedFormError(const std::string& m) : UsageError(m) {}
};
struct NoImageFormError : UsageError {
    explicit NoImageFormError(const std::string& m) : UsageError(m) {}
};
struct MethodUnavailableError : UsageError {
    explicit MethodUnavailableError(const std::string& m) : UsageError(m) {}
};

struct PoleProximityError : NumericError {
    explicit PoleProximityError(const std::string& m) : NumericError(m) {}
};
struct SingularKreinMatrixError : NumericError {
    explicit SingularKreinMatrixError(const std::string& m) : NumericError(m) {}
};
struct RootFindingFailureError : NumericError {
    explicit RootFindingFailureError(const std::string& m) : NumericError(m) {}
};
struct InsufficientSpectrumError : NumericError {
    explicit InsufficientSpectrumError(const std::string& m) : NumericError(m) {}
};
struct ContourFailureError : NumericError {
    explicit ContourFailureError(const std::string& m) : NumericError(m) {}
};
struct DivergentIntegralError : NumericError {
    explicit DivergentIntegralError(const std::string& m) : NumericError(m) {}
};
struct EndpointOnBoundaryError : NumericError {
    explicit EndpointOnBoundaryError(const std::string& m) : NumericError(m) {}
};
struct WindingTruncationError : NumericError {
    explicit WindingTruncationError(const std::string& m) : NumericError(m) {}
};

} // namespace qbound
