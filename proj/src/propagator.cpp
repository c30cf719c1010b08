#include "qbound/propagator.hpp"

#include <algorithm>
#include <cmath>

namespace qbound {

namespace {

const double kContourTol = 1e-8;
const int kContourMaxNodes = 4096;

void check_time(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw UsageError("T must be positive");
}

void check_points(Domain d, double x, double y) {
    if (!in_domain(d, x) || !in_domain(d, y))
        throw UsageError("x, y must lie in the domain");
}

// Gaussians beyond this displacement contribute below 1e-16 of the central
// peak and are dropped from image sums.
double image_cutoff(double T) { return 9.0 * std::sqrt(T) + 2.0; }

cd interval_images(double T, double x, double y, double sign) {
    int n_max = static_cast<int>(std::ceil(0.5 * image_cutoff(T))) + 1;
    double acc = 0.0;
    for (int n = -n_max; n <= n_max; ++n)
        acc += free_gaussian(T, x - y + 2.0 * n) +
               sign * free_gaussian(T, x + y + 2.0 * n);
    return acc;
}

cd winding_images(double T, double x, double y, double eps) {
    const cd I(0.0, 1.0);
    int n_max = static_cast<int>(std::ceil(image_cutoff(T))) + 1;
    cd acc = 0.0;
    // One factor e^{-i eps} per unit of displacement: paths from y to x that
    // wind n times pick up the phase of n boundary crossings.
    for (int n = -n_max; n <= n_max; ++n)
        acc += free_gaussian(T, x - y + n) * std::exp(-I * eps * static_cast<double>(n));
    return acc;
}

cd adaptive_simpson(const std::function<cd(double)>& f, double a, double b,
                    cd fa, cd fm, cd fb, cd whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    cd flm = f(lm), frm = f(rm);
    cd left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    cd right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    cd delta = left + right - whole;
    if (depth >= 40)
        throw DivergentIntegralError("adaptive quadrature refinement exhausted");
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    // Halving the tolerance per split keeps the panel errors summable.
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

cd integrate(const std::function<cd(double)>& f, double a, double b, double tol) {
    cd fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    cd whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 0);
}

} // namespace

double free_gaussian(double T, double dx) {
    return std::exp(-dx * dx / (2.0 * T)) / std::sqrt(2.0 * M_PI * T);
}

bool has_image_form(const NamedBC& bc, Domain domain) {
    switch (bc.tag) {
    case NamedBC::Tag::Neumann:
    case NamedBC::Tag::Dirichlet:
        return true;
    case NamedBC::Tag::Periodic:
    case NamedBC::Tag::PseudoPeriodic:
        return domain == Domain::UnitInterval;
    default:
        return false;
    }
}

cd image_sum_kernel(const NamedBC& bc, Domain domain, double T, double x, double y) {
    check_time(T);
    check_points(domain, x, y);
    if (!has_image_form(bc, domain))
        throw NoImageFormError("no image representation for " + format_bc(bc));

    if (domain == Domain::HalfLine) {
        double sign = bc.tag == NamedBC::Tag::Neumann ? 1.0 : -1.0;
        return free_gaussian(T, x - y) + sign * free_gaussian(T, x + y);
    }
    switch (bc.tag) {
    case NamedBC::Tag::Neumann: return interval_images(T, x, y, 1.0);
    case NamedBC::Tag::Dirichlet: return interval_images(T, x, y, -1.0);
    case NamedBC::Tag::Periodic: return winding_images(T, x, y, 0.0);
    case NamedBC::Tag::PseudoPeriodic: return winding_images(T, x, y, bc.param);
    default: throw NoImageFormError("no image representation for " + format_bc(bc));
    }
}

cd inverse_laplace_kernel(const ResolventEval& resolvent, double T, double x,
                          double y, double rightmost_pole) {
    check_time(T);
    // Parabola z = mu (1 + i theta)^2; the vertex sits right of every pole
    // and the integrand decays like e^{-mu T theta^2}.
    double mu = std::max(rightmost_pole + 1.0, 4.0 / T);
    double a = std::sqrt(1.0 + 40.0 / (mu * T));
    double h = M_PI / (35.0 + 2.25 * mu * T);
    int n = std::max(64, static_cast<int>(std::ceil(2.0 * a / h)));

    auto contour_sum = [&](int nodes) {
        double step = 2.0 * a / nodes;
        cd acc = 0.0;
        for (int j = 0; j < nodes; ++j) {
            double theta = -a + (j + 0.5) * step;
            cd w(1.0, theta);
            cd z = mu * w * w;
            acc += std::exp(z * T) * resolvent(x, y, SpectralParameter(z)) * w;
        }
        return acc * (mu / M_PI) * step;
    };

    cd coarse = contour_sum(n);
    while (2 * n <= kContourMaxNodes) {
        cd fine = contour_sum(2 * n);
        if (std::abs(fine - coarse) <= kContourTol * std::max(1.0, std::abs(fine)))
            return fine;
        coarse = fine;
        n *= 2;
    }
    throw ContourFailureError("contour quadrature did not settle within " +
                              std::to_string(kContourMaxNodes) + " nodes");
}

cd forward_laplace_check(const std::function<cd(double)>& kernel, cd z, double tol) {
    if (!(z.real() > 0.0))
        throw DivergentIntegralError("transform needs Re z > 0");

    // Short times: T = u^2 absorbs the 1/sqrt(T) edge of the kernel.
    auto short_part = integrate(
        [&](double u) {
            if (u <= 0.0) u = 1e-9;
            double T = u * u;
            return 2.0 * u * std::exp(-z * T) * kernel(T);
        },
        0.0, 1.0, tol);

    double t_max = 1.0 + 30.0 / z.real();
    auto long_part = integrate(
        [&](double T) { return std::exp(-z * T) * kernel(T); }, 1.0, t_max, tol);

    return short_part + long_part;
}

std::vector<double> uniform_grid(double a, double b, int n) {
    if (n < 2 || !(b > a)) throw UsageError("grid needs n >= 2 and b > a");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = a + (b - a) * i / (n - 1);
    return g;
}

std::vector<cd> sample_packet(const WavePacket& packet, const std::vector<double>& grid) {
    if (grid.size() < 2) throw UsageError("grid needs at least two points");
    if (!(packet.sigma > 0.0)) throw UsageError("packet width must be positive");
    const cd I(0.0, 1.0);
    std::vector<cd> psi(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        double d = grid[i] - packet.x0;
        psi[i] = std::exp(I * packet.k0 * grid[i] - d * d / (4.0 * packet.sigma * packet.sigma));
    }
    double h = grid[1] - grid[0];
    double norm2 = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) {
        double w = (i == 0 || i + 1 == grid.size()) ? 0.5 * h : h;
        norm2 += w * std::norm(psi[i]);
    }
    double scale = 1.0 / std::sqrt(norm2);
    for (auto& v : psi) v *= scale;
    return psi;
}

std::vector<cd> evolve_packet(const std::function<cd(double, double)>& kernel,
                              const std::vector<double>& grid,
                              const std::vector<cd>& psi0) {
    if (grid.size() != psi0.size() || grid.size() < 2)
        throw UsageError("grid and state sizes must match");
    double h = grid[1] - grid[0];
    std::vector<cd> out(grid.size(), cd(0.0, 0.0));
    for (size_t i = 0; i < grid.size(); ++i) {
        cd acc = 0.0;
        for (size_t j = 0; j < grid.size(); ++j) {
            double w = (j == 0 || j + 1 == grid.size()) ? 0.5 * h : h;
            acc += w * kernel(grid[i], grid[j]) * psi0[j];
        }
        out[i] = acc;
    }
    return out;
}

} // namespace qbound
