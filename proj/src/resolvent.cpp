#include "qbound/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qbound {

namespace {

const double kPoleTol = 1e-10;
const double kKreinCondMax = 1e12;

void check_point(Domain d, double v, const char* name) {
    if (!std::isfinite(v) || !in_domain(d, v))
        throw UsageError(std::string(name) + " outside the domain");
}

void check_z(cd z) {
    if (distance_to_negative_axis(z) <= kPoleTol)
        throw PoleProximityError("z within 1e-10 of the spectrum on (-inf, 0]");
}

cd sqrt2z(cd z) { return std::sqrt(2.0 * z); }

// Neumann background on the half-line: free kernel plus its mirror image.
cd background_halfline(double x, double y, cd z) {
    cd s = sqrt2z(z);
    return (std::exp(-s * std::abs(x - y)) + std::exp(-s * (x + y))) / s;
}

// Neumann background on [0,1]: reflection images repeat with period 2; the
// geometric factor 1/(1 - e^{-2s}) resums them.
cd background_interval(double x, double y, cd z) {
    cd s = sqrt2z(z);
    double u = std::abs(x - y);
    cd num = std::exp(-s * (x + y)) + std::exp(-s * (2.0 - x - y)) +
             std::exp(-s * u) + std::exp(-s * (2.0 - u));
    return num / (s * (1.0 - std::exp(-2.0 * s)));
}

cd background_eval(Domain d, double x, double y, cd z) {
    return d == Domain::HalfLine ? background_halfline(x, y, z)
                                 : background_interval(x, y, z);
}

// Half-weighted boundary matrix B(w,w') = C0_z(w,w') / 2.
Eigen::MatrixXcd boundary_matrix(Domain d, cd z) {
    if (d == Domain::HalfLine) {
        Eigen::MatrixXcd b(1, 1);
        b(0, 0) = 0.5 * background_halfline(0.0, 0.0, z);
        return b;
    }
    Eigen::MatrixXcd b(2, 2);
    b(0, 0) = 0.5 * background_interval(0.0, 0.0, z);
    b(1, 1) = 0.5 * background_interval(1.0, 1.0, z);
    b(0, 1) = 0.5 * background_interval(0.0, 1.0, z);
    b(1, 0) = b(0, 1);
    return b;
}

double robin_slope(double alpha) { return std::tan(0.5 * alpha); }

// Reflection coefficient of e^{-s(x+y)} in the half-line Robin resolvent.
// Near alpha = pi the tan(alpha/2) form degenerates; the cot form is exact
// there and is used inside a window around pi.
cd robin_coefficient(double alpha, cd s) {
    double a = std::remainder(alpha - M_PI, 2.0 * M_PI);
    if (std::abs(a) < 0.1) {
        double c = -std::tan(0.5 * a);  // cot(alpha/2)
        return (s * c - 1.0) / (s * (s * c + 1.0));
    }
    double t = robin_slope(alpha);
    return (s - t) / (s * (s + t));
}

} // namespace

cd ResolventEval::operator()(double x, double y, SpectralParameter z) const {
    check_point(domain_, x, "x");
    check_point(domain_, y, "y");
    return rule_(x, y, z.z);
}

ResolventEval background_resolvent(Domain domain, SpectralParameter z) {
    check_z(z.z);
    BoundaryUnitary u = to_unitary(NamedBC::neumann(), domain);
    return ResolventEval(domain, u, [domain](double x, double y, cd zz) {
        check_z(zz);
        return background_eval(domain, x, y, zz);
    });
}

Eigen::MatrixXcd krein_defect_matrix(const BoundaryUnitary& u, SpectralParameter z) {
    const int n = u.dim();
    const cd I(0.0, 1.0);
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd b = boundary_matrix(u.domain(), z.z);
    return (id - u.matrix()) * b - I * (id + u.matrix());
}

Eigen::MatrixXcd krein_R_matrix(const BoundaryUnitary& u, SpectralParameter z) {
    const int n = u.dim();
    Eigen::MatrixXcd m = krein_defect_matrix(u, z);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smin = svd.singularValues()(n - 1);
    double smax = svd.singularValues()(0);
    if (smin <= 0.0 || smax / smin > kKreinCondMax)
        throw SingularKreinMatrixError("Krein defect matrix is singular at this z");
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    return m.partialPivLu().solve(id - u.matrix());
}

ResolventEval krein_resolvent(const BoundaryUnitary& u, SpectralParameter z) {
    check_z(z.z);
    krein_R_matrix(u, z);  // surface singularities at the requested z eagerly
    Domain d = u.domain();
    BoundaryUnitary uc = u;
    return ResolventEval(d, u, [d, uc](double x, double y, cd zz) {
        check_z(zz);
        Eigen::MatrixXcd r = krein_R_matrix(uc, zz);
        const int n = r.rows();
        cd corr = 0.0;
        double w[2] = {0.0, 1.0};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                corr += background_eval(d, x, w[i], zz) * r(i, j) *
                        background_eval(d, w[j], y, zz);
        return background_eval(d, x, y, zz) - 0.5 * corr;
    });
}

bool has_closed_form(const NamedBC& bc) {
    using Tag = NamedBC::Tag;
    switch (bc.tag) {
    case Tag::Neumann:
    case Tag::Dirichlet:
    case Tag::RobinHalfLine:
    case Tag::Periodic:
    case Tag::PseudoPeriodic:
        return true;
    default:
        return false;
    }
}

ResolventEval closed_form_resolvent(const NamedBC& bc, Domain domain,
                                    SpectralParameter z) {
    using Tag = NamedBC::Tag;
    if (!has_closed_form(bc))
        throw NoClosedFormError("no closed-form resolvent for " + format_bc(bc) +
                                "; use the Krein or spectral route");
    BoundaryUnitary u = to_unitary(bc, domain);
    check_z(z.z);

    switch (bc.tag) {
    case Tag::Neumann:
        return ResolventEval(domain, u, [domain](double x, double y, cd zz) {
            check_z(zz);
            return background_eval(domain, x, y, zz);
        });
    case Tag::Dirichlet:
        if (domain == Domain::HalfLine)
            return ResolventEval(domain, u, [](double x, double y, cd zz) {
                check_z(zz);
                cd s = sqrt2z(zz);
                return (std::exp(-s * std::abs(x - y)) - std::exp(-s * (x + y))) / s;
            });
        return ResolventEval(domain, u, [](double x, double y, cd zz) {
            check_z(zz);
            cd s = sqrt2z(zz);
            double v = std::abs(x - y);
            cd num = std::exp(-s * v) + std::exp(-s * (2.0 - v)) -
                     std::exp(-s * (x + y)) - std::exp(-s * (2.0 - x - y));
            return num / (s * (1.0 - std::exp(-2.0 * s)));
        });
    case Tag::RobinHalfLine: {
        double alpha = bc.param;
        double t = robin_slope(alpha);
        // A negative slope binds one state, putting a pole at z = t^2/2.
        double pole = t < 0.0 ? 0.5 * t * t : -1.0;
        return ResolventEval(domain, u, [alpha, pole](double x, double y, cd zz) {
            check_z(zz);
            if (pole > 0.0 && std::abs(zz - cd(pole, 0.0)) <= kPoleTol)
                throw PoleProximityError("z within 1e-10 of the Robin bound-state pole");
            cd s = sqrt2z(zz);
            return std::exp(-s * std::abs(x - y)) / s +
                   robin_coefficient(alpha, s) * std::exp(-s * (x + y));
        });
    }
    case Tag::Periodic:
        return ResolventEval(domain, u, [](double x, double y, cd zz) {
            check_z(zz);
            cd s = sqrt2z(zz);
            double v = x - y;
            cd g = 1.0 - std::exp(-s);
            return (std::exp(-s * std::abs(v)) +
                    (std::exp(-s * (1.0 - v)) + std::exp(-s * (1.0 + v))) / g) / s;
        });
    case Tag::PseudoPeriodic: {
        double eps = bc.param;
        return ResolventEval(domain, u, [eps](double x, double y, cd zz) {
            check_z(zz);
            const cd I(0.0, 1.0);
            cd s = sqrt2z(zz);
            double v = x - y;
            cd ep = std::exp(I * eps), em = std::exp(-I * eps);
            return (std::exp(-s * std::abs(v)) +
                    ep * std::exp(-s * (1.0 - v)) / (1.0 - std::exp(-s) * ep) +
                    em * std::exp(-s * (1.0 + v)) / (1.0 - std::exp(-s) * em)) / s;
        });
    }
    default:
        throw NoClosedFormError("unreachable");
    }
}

namespace {

// Scale-invariant smallness measure for the defect determinant.
double det_measure(const Eigen::MatrixXcd& m) {
    double scale = 1.0;
    for (int r = 0; r < m.rows(); ++r)
        scale *= std::max(m.row(r).norm(), std::numeric_limits<double>::min());
    return std::abs(m.determinant()) / scale;
}

double defect_at_kappa(const BoundaryUnitary& u, double kappa) {
    cd z(0.5 * kappa * kappa, 0.0);
    return det_measure(krein_defect_matrix(u, z));
}

// Golden-section minimization; the measure has a V-shaped kink at simple
// zeros, for which this converges to full precision in the abscissa.
double golden_min(const std::function<double(double)>& f, double a, double b) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

BoundStateReport find_bound_states(const BoundaryUnitary& u, double search_max) {
    if (!(search_max > 0.0))
        throw UsageError("search_max must be positive");
    const int n = static_cast<int>(std::ceil(10.0 * search_max));
    const double h = search_max / n;
    std::vector<double> f(n + 1, std::numeric_limits<double>::infinity());
    for (int i = 1; i <= n; ++i)
        f[i] = defect_at_kappa(u, i * h);

    BoundStateReport report;
    auto accept = [&](double kappa) {
        if (defect_at_kappa(u, kappa) >= 1e-10) return;
        for (double k : report.kappa)
            if (std::abs(k - kappa) <= 1e-8 * std::max(1.0, kappa)) return;
        report.kappa.push_back(kappa);
    };

    for (int i = 1; i <= n; ++i) {
        bool left_ok = i == 1 || f[i] <= f[i - 1];
        bool right_ok = i == n || f[i] <= f[i + 1];
        if (!(left_ok && right_ok)) continue;
        double a = (i == 1) ? 0.5 * h : (i - 1) * h;
        double b = (i == n) ? n * h : (i + 1) * h;
        double kappa = golden_min([&](double k) { return defect_at_kappa(u, k); }, a, b);
        accept(kappa);
    }

    std::sort(report.kappa.begin(), report.kappa.end());
    for (double k : report.kappa)
        report.pole_z.push_back(0.5 * k * k);
    return report;
}

BoundStateReport find_bound_states(const NamedBC& bc, Domain domain,
                                   double search_max) {
    return find_bound_states(to_unitary(bc, domain), search_max);
}

} // namespace qbound
