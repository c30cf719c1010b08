// Self-adjoint boundary conditions for H = -(1/2) d^2/dx^2 on the half-line
// [0, inf) and the unit interval [0, 1].
//
// Every self-adjoint realization is labeled by a unitary matrix U acting on
// boundary data (1x1 on the half-line, 2x2 on the interval). With
//   phi     = boundary values of psi,
//   phidot  = outward normal derivatives, i.e. phidot(0) = -psi'(0) and,
//             on the interval, phidot(1) = +psi'(1),
// the condition reads
//   (I - U) phi = i (I + U) phidot.
#pragma once

#include "qbound/types.hpp"

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace qbound {

// Boundary trace of a wavefunction: values and outward normal derivatives,
// one entry per boundary point (ordered {0} or {0, 1}).
struct BoundaryData {
    Domain domain;
    Eigen::VectorXcd value;
    Eigen::VectorXcd normal_derivative;
};

// Unitary boundary matrix, validated on construction.
class BoundaryUnitary {
public:
    BoundaryUnitary(Domain domain, Eigen::MatrixXcd u);

    Domain domain() const { return domain_; }
    const Eigen::MatrixXcd& matrix() const { return u_; }
    int dim() const { return static_cast<int>(u_.rows()); }

private:
    Domain domain_;
    Eigen::MatrixXcd u_;
};

// The named boundary-condition families exposed by the CLI and the catalog.
struct NamedBC {
    enum class Tag {
        Neumann,
        Dirichlet,
        RobinHalfLine,   // psi'(0) = tan(alpha/2) psi(0)
        Periodic,
        PseudoPeriodic,  // psi(1) = e^{i eps} psi(0), same for psi'
        QuasiPeriodic,   // psi(1) = tan(alpha/2) psi(0), psi'(1) = cot(alpha/2) psi'(0)
        DeltaPoint,      // delta potential of strength a at the glued point 0 ~ 1
        Custom,
    };

    Tag tag = Tag::Neumann;
    double param = 0.0;                       // alpha, eps, or a
    std::optional<Eigen::MatrixXcd> custom;   // only for Tag::Custom

    static NamedBC neumann() { return {Tag::Neumann, 0.0, {}}; }
    static NamedBC dirichlet() { return {Tag::Dirichlet, 0.0, {}}; }
    static NamedBC robin(double alpha) { return {Tag::RobinHalfLine, alpha, {}}; }
    static NamedBC periodic() { return {Tag::Periodic, 0.0, {}}; }
    static NamedBC pseudo_periodic(double eps) { return {Tag::PseudoPeriodic, eps, {}}; }
    static NamedBC quasi_periodic(double alpha) { return {Tag::QuasiPeriodic, alpha, {}}; }
    static NamedBC delta_point(double a) { return {Tag::DeltaPoint, a, {}}; }
    static NamedBC custom_matrix(Eigen::MatrixXcd m) { return {Tag::Custom, 0.0, std::move(m)}; }
};

// Map a named family to its boundary unitary on the given domain.
// Throws IncompatibleDomainError when the family does not live there.
BoundaryUnitary to_unitary(const NamedBC& bc, Domain domain);

// Residual of the boundary condition, || (I-U) phi - i (I+U) phidot ||_inf.
double bc_residual(const BoundaryUnitary& u, const BoundaryData& data);

bool satisfies_bc(const BoundaryUnitary& u, const BoundaryData& data,
                  double tol = 1e-10);

// Text forms used on the CLI: "neumann", "dirichlet", "robin:alpha=<f>",
// "periodic", "pseudo:eps=<f>", "quasi:alpha=<f>", "delta:a=<f>",
// "custom:[[re,im],...]" (1 or 4 row-major complex entries).
NamedBC parse_bc(const std::string& text);
std::string format_bc(const NamedBC& bc);

// Canonical syntax list for the CLI catalog command.
struct BcCatalogEntry {
    std::string syntax;
    std::string domains;
    std::string description;
};
std::vector<BcCatalogEntry> bc_catalog();

} // namespace qbound
