#pragma once

// Path-integral Monte Carlo estimators for the Euclidean kernel.
//
// All estimators ride on Brownian bridges pinned at y (time 0) and x
// (time T), sampled by exact conditional increments, so the only systematic
// errors are the ones called out per estimator below. Randomness is
// counter-based: every path index owns a private splitmix64 stream derived
// from (seed, index), which makes runs bit-reproducible for a fixed
// configuration, and accumulation proceeds in fixed chunk order.
//
//  * Dirichlet (absorbing): weight = product over steps and faces of the
//    exact straight-boundary bridge non-crossing probability
//    1 - exp(-2 d_j d_{j+1} / dt); paths whose skeleton exits are killed.
//    Unbiased on the half line; on the interval the neglected
//    both-faces-in-one-step events are exponentially small in 1/dt.
//  * Neumann half line (reflecting): per path 2 - S with S the survival
//    weight above, an unbiased estimator of 1 + P(bridge touches 0).
//  * Neumann interval: the kernel is a two-sided sum of reflected images;
//    the estimator importance-samples the image index from a widened
//    discrete Gaussian and reweights, leaving the bridge integral exact.
//  * Periodic / pseudo-periodic: importance sampling over winding sectors,
//    each sector weighted by its free Gaussian and phased by e^{-i eps n}.

#include <cstdint>

#include "qbound/bc.hpp"
#include "qbound/types.hpp"

namespace qbound {

struct McConfig {
    double T = 1.0;
    double x = 0.5;
    double y = 0.5;
    long long n_paths = 100000;
    int n_steps = 64;
    std::uint64_t seed = 1;
};

struct McEstimate {
    cd mean;
    double std_error;     // component-combined standard error of the mean
    long long n_paths = 0;
    long long n_killed = 0;  // absorbing estimators: skeleton left the domain
};

McEstimate mc_dirichlet_kernel(Domain domain, const McConfig& cfg);
McEstimate mc_neumann_kernel(Domain domain, const McConfig& cfg);

// Winding-sector estimator on the unit interval; eps = 0 is periodic.
McEstimate mc_winding_kernel(double eps, const McConfig& cfg);

// Dispatch by named condition; throws MethodUnavailableError when no
// estimator covers it (Robin, quasi-periodic, point interaction, custom).
McEstimate mc_kernel(const NamedBC& bc, Domain domain, const McConfig& cfg);

} // namespace qbound
