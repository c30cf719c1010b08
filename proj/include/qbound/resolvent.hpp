// Resolvent kernels C_z(x,y) of (z + H)^{-1}, H = -(1/2) d^2/dx^2, for
// self-adjoint boundary conditions labeled by a boundary unitary U.
//
// Normalization: the free part of every kernel is e^{-s|x-y|}/s with
// s = sqrt(2z), equivalently the x-derivative jumps by -2 across x = y.
// For any extension, C_z^U is obtained from the Neumann background C0_z by
// the rank-(<=2) boundary correction
//   C^U_z(x,y) = C0_z(x,y) - (1/2) sum_{w,w'} C0_z(x,w) R(w,w') C0_z(w',y),
//   R = [ (I-U) B - i (I+U) ]^{-1} (I-U),   B(w,w') = (1/2) C0_z(w,w'),
// where w, w' run over the boundary points. The half-weighted boundary
// matrix B keeps R in the convention where Dirichlet gives R = sqrt(2z) on
// the half-line.
#pragma once

#include "qbound/bc.hpp"
#include "qbound/types.hpp"

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace qbound {

// A resolvent kernel. The rule is z-generic; pole-proximity checks run on
// every evaluation.
class ResolventEval {
public:
    using Rule = std::function<cd(double, double, cd)>;

    ResolventEval(Domain domain, BoundaryUnitary bc, Rule rule)
        : domain_(domain), bc_(std::move(bc)), rule_(std::move(rule)) {}

    Domain domain() const { return domain_; }
    const BoundaryUnitary& bc() const { return bc_; }

    cd operator()(double x, double y, SpectralParameter z) const;

private:
    Domain domain_;
    BoundaryUnitary bc_;
    Rule rule_;
};

// Neumann background resolvent. Spectrum on (-inf, 0] in z, guarded to
// distance 1e-10.
ResolventEval background_resolvent(Domain domain, SpectralParameter z);

// Krein boundary correction for arbitrary unitary U.
ResolventEval krein_resolvent(const BoundaryUnitary& u, SpectralParameter z);

// The matrices entering the correction, exposed for cross-checks.
Eigen::MatrixXcd krein_defect_matrix(const BoundaryUnitary& u, SpectralParameter z);
Eigen::MatrixXcd krein_R_matrix(const BoundaryUnitary& u, SpectralParameter z);

// Closed forms: Neumann, Dirichlet, Robin on the half-line; Neumann,
// Dirichlet, Periodic, PseudoPeriodic on the interval. Others throw
// NoClosedFormError.
ResolventEval closed_form_resolvent(const NamedBC& bc, Domain domain,
                                    SpectralParameter z);
bool has_closed_form(const NamedBC& bc);

// Poles of C_z at z = kappa^2 / 2 > 0 (bound states, E = -z). Located by
// scanning |det| of the Krein defect matrix over kappa.
struct BoundStateReport {
    std::vector<double> kappa;   // ascending
    std::vector<double> pole_z;  // kappa^2 / 2
};

BoundStateReport find_bound_states(const BoundaryUnitary& u,
                                   double search_max = 50.0);
BoundStateReport find_bound_states(const NamedBC& bc, Domain domain,
                                   double search_max = 50.0);

} // namespace qbound
