// Discrete spectra on the unit interval. Eigenvalues E of H psi = E psi are
// located as zeros of the smallest singular value of a 2x2 secular matrix
// acting on the coefficients of a two-dimensional solution basis:
//   E > 0: {cos kx, sin kx},  k = sqrt(2E)
//   E = 0: {1, x}
//   E < 0: {cosh kx, sinh kx}, kappa = sqrt(-2E)
// The matrix rows are the boundary condition (I-U) phi = i (I+U) phidot
// applied to the basis.
#pragma once

#include "qbound/bc.hpp"
#include "qbound/types.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace qbound {

struct Eigenfunction {
    enum class Basis { Trig, Hyperbolic, ExpPair, Linear };

    Basis basis = Basis::Linear;
    double rate = 0.0;  // k, kappa, or unused
    cd c0{0.0, 0.0};
    cd c1{0.0, 0.0};

    // Trig:       c0 cos(rx) + c1 sin(rx)
    // Hyperbolic: c0 cosh(rx) + c1 sinh(rx)
    // ExpPair:    c0 e^{r(x-1)} + c1 e^{-rx}    (used for large kappa)
    // Linear:     c0 + c1 x
    cd value(double x) const;
    cd derivative(double x) const;
};

struct EigenPair {
    double eigenvalue = 0.0;
    int multiplicity = 1;
    std::vector<Eigenfunction> functions;  // orthonormal in L^2(0,1)
};

struct Spectrum {
    BoundaryUnitary bc;
    std::vector<EigenPair> pairs;  // ascending eigenvalue

    int level_count() const;                  // sum of multiplicities
    std::vector<double> eigenvalues() const;  // repeated per multiplicity
};

// Secular matrix in the unscaled bases above. Interval only.
Eigen::Matrix2cd secular_matrix(const BoundaryUnitary& u, double E);

// The lowest `count` levels (counting multiplicity), negative ones included.
// Negative search covers kappa in (0, kappa_max].
Spectrum solve_spectrum(const BoundaryUnitary& u, int count,
                        double kappa_max = 50.0);
Spectrum solve_spectrum(const NamedBC& bc, int count, double kappa_max = 50.0);

// Truncated eigensum for the heat kernel, sum_n e^{-E_n T} psi_n(x)
// conj(psi_n(y)). Throws InsufficientSpectrumError when the omitted tail
// cannot be bounded below tail_tol.
cd spectral_heat_kernel(const Spectrum& spec, double T, double x, double y,
                        double tail_tol = 1e-9);

// Evolve grid samples of a state by e^{-TH} through the eigenmode
// expansion: psi_T = sum_n e^{-E_n T} <psi_n, psi> psi_n, trapezoid inner
// products on a uniform grid. T = 0 reproduces the state up to spectral
// truncation. Norm is non-increasing in T as long as the spectrum is
// non-negative.
std::vector<cd> evolve_with_spectrum(const Spectrum& spec,
                                     const std::vector<double>& grid,
                                     const std::vector<cd>& psi0, double T);

// JSON document with eigenvalues, multiplicities and eigenfunction samples
// on a uniform 257-point grid.
std::string spectrum_to_json(const Spectrum& spec);

} // namespace qbound
