#pragma once

// Euclidean-time propagators e^{-TH} for H = -(1/2) d^2/dx^2 with boundary
// conditions encoded by a unitary. Three independent routes live here:
//
//  * image sums: free Gaussians G_T(d) = e^{-d^2/(2T)} / sqrt(2 pi T)
//    reflected or translated into the domain, available for Neumann,
//    Dirichlet, periodic and pseudo-periodic conditions;
//  * numerical inverse Laplace transform of a resolvent kernel along a
//    parabolic contour, available for every boundary unitary;
//  * the forward transform int_0^infty e^{-zT} K_T dT, used to close the
//    loop against a resolvent evaluated directly at z.
//
// A fourth route (summing e^{-lambda T} psi psi* over a computed spectrum)
// lives in spectral.hpp, and a fifth (path Monte Carlo) in path_mc.hpp.

#include <functional>
#include <vector>

#include "qbound/bc.hpp"
#include "qbound/resolvent.hpp"
#include "qbound/types.hpp"

namespace qbound {

// Free-line heat kernel factor.
double free_gaussian(double T, double dx);

bool has_image_form(const NamedBC& bc, Domain domain);

// Closed-form kernel by the method of images, truncated once the omitted
// Gaussians fall below a 1e-16 relative tail. Throws NoImageFormError for
// conditions without an image representation (Robin, quasi-periodic, point
// interaction, custom matrices).
cd image_sum_kernel(const NamedBC& bc, Domain domain, double T, double x, double y);

// K_T(x, y) as the Bromwich integral (2 pi i)^{-1} int e^{zT} C_z(x, y) dz
// along the parabola z = mu (1 + i theta)^2, evaluated by the midpoint rule
// with node doubling as the error estimate. rightmost_pole is the largest
// real part among resolvent poles (positive when bound states exist); the
// contour vertex stays one unit to its right. Throws ContourFailureError
// when the doubling estimate stays above 1e-5 or the node budget runs out.
cd inverse_laplace_kernel(const ResolventEval& resolvent, double T, double x,
                          double y, double rightmost_pole = 0.0);

// int_0^infty e^{-zT} kernel(T) dT for Re z > 0, adaptive Simpson with a
// substitution T = u^2 taming the 1/sqrt(T) short-time growth. Throws
// DivergentIntegralError when Re z <= 0.
cd forward_laplace_check(const std::function<cd(double)>& kernel, cd z,
                         double tol = 1e-9);

// Gaussian packet exp(i k0 x - (x - x0)^2 / (4 sigma^2)), normalized on the
// sampling grid.
struct WavePacket {
    double x0 = 0.5;
    double k0 = 0.0;
    double sigma = 0.1;
};

std::vector<double> uniform_grid(double a, double b, int n);

std::vector<cd> sample_packet(const WavePacket& packet, const std::vector<double>& grid);

// Trapezoid application of an integral kernel to grid samples:
// out_i = sum_j w_j kernel(grid_i, grid_j) psi_j.
std::vector<cd> evolve_packet(const std::function<cd(double, double)>& kernel,
                              const std::vector<double>& grid,
                              const std::vector<cd>& psi0);

} // namespace qbound
