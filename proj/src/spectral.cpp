#include "qbound/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <json.hpp>

namespace qbound {

namespace {

const double kResidualAccept = 1e-10;   // refined root acceptance
const double kDegenerateTol = 1e-8;     // second singular value => multiplicity 2
const int kGridPerUnit = 40;

using Eigen::Matrix2cd;
using Eigen::Vector2cd;

enum class Regime { Trig, Hyperbolic, ExpPair, Linear };

// Boundary-value and outward-derivative matrices of the solution basis,
// columns indexed by the two basis coefficients. The bases are scaled so the
// columns stay well conditioned: sin(kx)/k joins {1, x} continuously at
// k -> 0, and for large kappa the exponentials e^{kappa(x-1)}, e^{-kappa x}
// replace cosh/sinh whose columns collide.
void basis_traces(Regime regime, double r, Matrix2cd& phi, Matrix2cd& phidot) {
    switch (regime) {
    case Regime::Trig:
        phi << 1.0, 0.0,
               std::cos(r), std::sin(r) / r;
        phidot << 0.0, -1.0,
                  -r * std::sin(r), std::cos(r);
        break;
    case Regime::Hyperbolic:
        phi << 1.0, 0.0,
               std::cosh(r), std::sinh(r) / r;
        phidot << 0.0, -1.0,
                  r * std::sinh(r), std::cosh(r);
        break;
    case Regime::ExpPair: {
        double e = std::exp(-r);
        phi << e, 1.0,
               1.0, e;
        phidot << -r * e, r,
                  r, -r * e;
        break;
    }
    case Regime::Linear:
        phi << 1.0, 0.0,
               1.0, 1.0;
        phidot << 0.0, -1.0,
                  0.0, 1.0;
        break;
    }
}

struct SecularProbe {
    Matrix2cd m;
    double scale;       // ||I+U|| ||phidot|| + ||I-U|| ||phi||
    double sigma[2];    // descending singular values
    Matrix2cd v;        // right singular vectors
};

SecularProbe probe(const Matrix2cd& u, Regime regime, double r, bool want_vectors) {
    const cd I(0.0, 1.0);
    Matrix2cd phi, phidot;
    basis_traces(regime, r, phi, phidot);
    Matrix2cd id = Matrix2cd::Identity();
    Matrix2cd t1 = I * (id + u) * phidot;
    Matrix2cd t2 = (id - u) * phi;
    SecularProbe p;
    p.m = t1 - t2;
    // The scale uses factor norms, not ||t1|| + ||t2||: at a double root the
    // products themselves vanish and would drag the normalization to zero
    // with sigma_min, leaving a finite ratio that hides the root.
    p.scale = (id + u).norm() * phidot.norm() + (id - u).norm() * phi.norm();
    if (p.scale <= 0.0) p.scale = 1.0;
    Eigen::JacobiSVD<Matrix2cd> svd(p.m, want_vectors ? Eigen::ComputeFullV : 0);
    auto sv = svd.singularValues();
    p.sigma[0] = sv(0);
    p.sigma[1] = sv(1);
    if (want_vectors) p.v = svd.matrixV();
    return p;
}

double residual(const Matrix2cd& u, Regime regime, double r) {
    SecularProbe p = probe(u, regime, r, false);
    return p.sigma[1] / p.scale;
}

double golden_min(const std::function<double(double)>& f, double a, double b) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 120 && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
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

struct RawLevel {
    double eigenvalue;
    std::vector<Eigenfunction> functions;  // un-normalized
};

Eigenfunction make_function(Regime regime, double r, const Vector2cd& coeff) {
    Eigenfunction f;
    f.rate = r;
    switch (regime) {
    case Regime::Trig:
        f.basis = Eigenfunction::Basis::Trig;
        f.c0 = coeff(0);
        f.c1 = coeff(1) / r;
        break;
    case Regime::Hyperbolic:
        f.basis = Eigenfunction::Basis::Hyperbolic;
        f.c0 = coeff(0);
        f.c1 = coeff(1) / r;
        break;
    case Regime::ExpPair:
        f.basis = Eigenfunction::Basis::ExpPair;
        f.c0 = coeff(0);
        f.c1 = coeff(1);
        break;
    case Regime::Linear:
        f.basis = Eigenfunction::Basis::Linear;
        f.rate = 0.0;
        f.c0 = coeff(0);
        f.c1 = coeff(1);
        break;
    }
    return f;
}

double level_from(Regime regime, double r) {
    switch (regime) {
    case Regime::Trig: return 0.5 * r * r;
    case Regime::Hyperbolic:
    case Regime::ExpPair: return -0.5 * r * r;
    case Regime::Linear: return 0.0;
    }
    return 0.0;
}

// Accept a refined root: residual must vanish and the null space supplies the
// eigenfunctions, one per singular value below the degeneracy threshold.
bool harvest(const Matrix2cd& u, Regime regime, double r, std::vector<RawLevel>& out) {
    SecularProbe p = probe(u, regime, r, true);
    if (p.sigma[1] / p.scale >= kResidualAccept) return false;
    RawLevel lvl;
    lvl.eigenvalue = level_from(regime, r);
    lvl.functions.push_back(make_function(regime, r, p.v.col(1)));
    if (p.sigma[0] / p.scale < kDegenerateTol)
        lvl.functions.push_back(make_function(regime, r, p.v.col(0)));
    out.push_back(std::move(lvl));
    return true;
}

// Scan [lo, hi] on a uniform grid, refine every local minimum of the secular
// residual by golden section.
void scan_segment(const Matrix2cd& u, Regime regime, double lo, double hi,
                  int per_unit, std::vector<RawLevel>& out) {
    int n = std::max(8, static_cast<int>(std::ceil((hi - lo) * per_unit)));
    double h = (hi - lo) / n;
    std::vector<double> f(n + 1);
    for (int i = 0; i <= n; ++i)
        f[i] = residual(u, regime, lo + i * h);

    std::vector<double> roots;
    for (int i = 0; i <= n; ++i) {
        bool left_ok = i == 0 || f[i] <= f[i - 1];
        bool right_ok = i == n || f[i] <= f[i + 1];
        if (!(left_ok && right_ok)) continue;
        double a = lo + (i == 0 ? 0 : i - 1) * h;
        double b = lo + (i == n ? n : i + 1) * h;
        double r = golden_min([&](double k) { return residual(u, regime, k); }, a, b);
        bool dup = false;
        for (double q : roots)
            if (std::abs(q - r) <= 1e-7 * std::max(1.0, r)) dup = true;
        if (dup) continue;
        if (harvest(u, regime, r, out)) roots.push_back(r);
    }
}

// L^2(0,1) inner product of two functions sharing basis family and rate,
// from the closed-form moments of the (real) basis pair. Closed forms keep
// normalization at machine precision; quadrature at the same accuracy would
// need impractical panel counts for the highest modes.
cd inner_product(const Eigenfunction& a, const Eigenfunction& b) {
    if (a.basis != b.basis || a.rate != b.rate)
        throw RootFindingFailureError("inner product across basis families");
    double m00, m01, m11;
    double r = a.rate;
    switch (a.basis) {
    case Eigenfunction::Basis::Trig:
        m00 = 0.5 + std::sin(2.0 * r) / (4.0 * r);
        m11 = 0.5 - std::sin(2.0 * r) / (4.0 * r);
        m01 = (1.0 - std::cos(2.0 * r)) / (4.0 * r);
        break;
    case Eigenfunction::Basis::Hyperbolic:
        m00 = 0.5 + std::sinh(2.0 * r) / (4.0 * r);
        m11 = -0.5 + std::sinh(2.0 * r) / (4.0 * r);
        m01 = (std::cosh(2.0 * r) - 1.0) / (4.0 * r);
        break;
    case Eigenfunction::Basis::ExpPair:
        m00 = m11 = (1.0 - std::exp(-2.0 * r)) / (2.0 * r);
        m01 = std::exp(-r);
        break;
    case Eigenfunction::Basis::Linear:
    default:
        m00 = 1.0;
        m01 = 0.5;
        m11 = 1.0 / 3.0;
        break;
    }
    return std::conj(a.c0) * b.c0 * m00 + std::conj(a.c1) * b.c1 * m11 +
           (std::conj(a.c0) * b.c1 + std::conj(a.c1) * b.c0) * m01;
}

void scale_function(Eigenfunction& f, cd factor) {
    f.c0 *= factor;
    f.c1 *= factor;
}

void add_scaled(Eigenfunction& f, const Eigenfunction& g, cd factor) {
    // Only valid within one basis family and rate; used for degenerate pairs.
    f.c0 += factor * g.c0;
    f.c1 += factor * g.c1;
}

// Fix the arbitrary phase: largest coefficient becomes real positive.
void fix_phase(Eigenfunction& f) {
    cd lead = std::abs(f.c0) >= std::abs(f.c1) ? f.c0 : f.c1;
    double m = std::abs(lead);
    if (m > 0.0) scale_function(f, std::conj(lead) / m);
}

void orthonormalize(std::vector<Eigenfunction>& fs) {
    for (size_t i = 0; i < fs.size(); ++i) {
        for (size_t j = 0; j < i; ++j) {
            cd overlap = inner_product(fs[j], fs[i]);
            add_scaled(fs[i], fs[j], -overlap);
        }
        double norm = std::sqrt(inner_product(fs[i], fs[i]).real());
        if (norm <= 1e-12)
            throw RootFindingFailureError("degenerate null vectors collapsed during orthonormalization");
        scale_function(fs[i], 1.0 / norm);
        fix_phase(fs[i]);
    }
}

} // namespace

cd Eigenfunction::value(double x) const {
    switch (basis) {
    case Basis::Trig: return c0 * std::cos(rate * x) + c1 * std::sin(rate * x);
    case Basis::Hyperbolic: return c0 * std::cosh(rate * x) + c1 * std::sinh(rate * x);
    case Basis::ExpPair: return c0 * std::exp(rate * (x - 1.0)) + c1 * std::exp(-rate * x);
    case Basis::Linear: return c0 + c1 * x;
    }
    return {};
}

cd Eigenfunction::derivative(double x) const {
    switch (basis) {
    case Basis::Trig:
        return rate * (-c0 * std::sin(rate * x) + c1 * std::cos(rate * x));
    case Basis::Hyperbolic:
        return rate * (c0 * std::sinh(rate * x) + c1 * std::cosh(rate * x));
    case Basis::ExpPair:
        return rate * (c0 * std::exp(rate * (x - 1.0)) - c1 * std::exp(-rate * x));
    case Basis::Linear:
        return c1;
    }
    return {};
}

int Spectrum::level_count() const {
    int n = 0;
    for (const auto& p : pairs) n += p.multiplicity;
    return n;
}

std::vector<double> Spectrum::eigenvalues() const {
    std::vector<double> out;
    for (const auto& p : pairs)
        for (int i = 0; i < p.multiplicity; ++i)
            out.push_back(p.eigenvalue);
    return out;
}

Eigen::Matrix2cd secular_matrix(const BoundaryUnitary& u, double E) {
    if (u.domain() != Domain::UnitInterval)
        throw IncompatibleDomainError("secular matrix is defined on the unit interval");
    const cd I(0.0, 1.0);
    Matrix2cd phi, phidot;
    if (E > 0.0) {
        double k = std::sqrt(2.0 * E);
        phi << 1.0, 0.0,
               std::cos(k), std::sin(k);
        phidot << 0.0, -k,
                  -k * std::sin(k), k * std::cos(k);
    } else if (E < 0.0) {
        double kp = std::sqrt(-2.0 * E);
        phi << 1.0, 0.0,
               std::cosh(kp), std::sinh(kp);
        phidot << 0.0, -kp,
                  kp * std::sinh(kp), kp * std::cosh(kp);
    } else {
        phi << 1.0, 0.0,
               1.0, 1.0;
        phidot << 0.0, -1.0,
                  0.0, 1.0;
    }
    Matrix2cd id = Matrix2cd::Identity();
    return I * (id + u.matrix()) * phidot - (id - u.matrix()) * phi;
}

Spectrum solve_spectrum(const BoundaryUnitary& u, int count, double kappa_max) {
    if (u.domain() != Domain::UnitInterval)
        throw IncompatibleDomainError("spectrum solver works on the unit interval");
    if (count < 1) throw UsageError("count must be positive");
    const Matrix2cd um = u.matrix();
    const double k_floor = 1e-4;
    const double k_max = 2.0 * M_PI * (count + 4);

    for (int attempt = 0; attempt < 4; ++attempt) {
        int per_unit = kGridPerUnit << attempt;
        std::vector<RawLevel> raw;

        // Negative levels: hyperbolic basis up to kappa = 8.5, exponential
        // pair beyond; the segments overlap and duplicates merge later.
        if (kappa_max > 0.0) {
            double split = std::min(kappa_max, 8.5);
            scan_segment(um, Regime::Hyperbolic, k_floor, split, per_unit, raw);
            if (kappa_max > 7.5)
                scan_segment(um, Regime::ExpPair, 7.5, kappa_max, per_unit, raw);
        }

        // Zero mode.
        {
            SecularProbe p = probe(um, Regime::Linear, 0.0, true);
            if (p.sigma[1] / p.scale < kResidualAccept) {
                RawLevel lvl;
                lvl.eigenvalue = 0.0;
                lvl.functions.push_back(make_function(Regime::Linear, 0.0, p.v.col(1)));
                if (p.sigma[0] / p.scale < kDegenerateTol)
                    lvl.functions.push_back(make_function(Regime::Linear, 0.0, p.v.col(0)));
                raw.push_back(std::move(lvl));
            }
        }

        // Positive levels. Oscillatory roots that creep toward k = 0 are the
        // zero mode seen from the k side; they fail the residual test unless
        // genuinely present, so the floor only needs to dodge k = 0 itself.
        scan_segment(um, Regime::Trig, k_floor, k_max, per_unit, raw);

        // Merge coincident eigenvalues (two scan segments, or an accidental
        // degeneracy found twice).
        std::sort(raw.begin(), raw.end(), [](const RawLevel& a, const RawLevel& b) {
            return a.eigenvalue < b.eigenvalue;
        });
        std::vector<RawLevel> merged;
        for (auto& lvl : raw) {
            if (!merged.empty() &&
                std::abs(lvl.eigenvalue - merged.back().eigenvalue) <=
                    1e-7 * std::max(1.0, std::abs(lvl.eigenvalue)))
                continue;  // same root found by two overlapping scan segments
            merged.push_back(std::move(lvl));
        }

        int total = 0;
        for (const auto& lvl : merged) total += static_cast<int>(lvl.functions.size());
        if (total < count && attempt < 3) continue;
        if (total < count)
            throw RootFindingFailureError("found " + std::to_string(total) +
                                          " levels, requested " + std::to_string(count));

        Spectrum spec{u, {}};
        int kept = 0;
        for (auto& lvl : merged) {
            if (kept >= count) break;
            EigenPair pair;
            pair.eigenvalue = lvl.eigenvalue;
            pair.functions = std::move(lvl.functions);
            orthonormalize(pair.functions);
            pair.multiplicity = static_cast<int>(pair.functions.size());
            kept += pair.multiplicity;
            spec.pairs.push_back(std::move(pair));
        }
        return spec;
    }
    throw RootFindingFailureError("eigenvalue scan failed to converge");
}

Spectrum solve_spectrum(const NamedBC& bc, int count, double kappa_max) {
    return solve_spectrum(to_unitary(bc, Domain::UnitInterval), count, kappa_max);
}

cd spectral_heat_kernel(const Spectrum& spec, double T, double x, double y,
                        double tail_tol) {
    if (!(T > 0.0)) throw UsageError("T must be positive");
    if (!in_domain(Domain::UnitInterval, x) || !in_domain(Domain::UnitInterval, y))
        throw UsageError("x, y must lie in [0, 1]");
    if (spec.pairs.empty())
        throw InsufficientSpectrumError("empty spectrum");

    // Bound the omitted modes: eigenvalues continue upward with k spacing
    // about pi, and normalized eigenfunctions obey sup |psi|^2 <= 4.
    double top = spec.pairs.back().eigenvalue;
    double k_top = std::sqrt(2.0 * std::max(top, 0.0));
    double tail = 0.0;
    for (int m = 1; m <= 64; ++m) {
        double km = k_top + M_PI * m;
        tail += 4.0 * std::exp(-0.5 * km * km * T);
    }
    if (tail > tail_tol)
        throw InsufficientSpectrumError(
            "spectrum top " + std::to_string(top) + " leaves heat-kernel tail above tolerance");

    cd acc = 0.0;
    for (const auto& pair : spec.pairs) {
        double w = std::exp(-pair.eigenvalue * T);
        for (const auto& f : pair.functions)
            acc += w * f.value(x) * std::conj(f.value(y));
    }
    return acc;
}

std::vector<cd> evolve_with_spectrum(const Spectrum& spec,
                                     const std::vector<double>& grid,
                                     const std::vector<cd>& psi0, double T) {
    if (grid.size() != psi0.size() || grid.size() < 2)
        throw UsageError("grid and state sizes must match");
    if (T < 0.0) throw UsageError("T must be non-negative");
    if (spec.pairs.empty()) throw InsufficientSpectrumError("empty spectrum");

    double h = grid[1] - grid[0];
    auto weight = [&](size_t j) {
        return (j == 0 || j + 1 == grid.size()) ? 0.5 * h : h;
    };
    std::vector<cd> out(grid.size(), cd(0.0, 0.0));
    for (const auto& pair : spec.pairs) {
        double damp = std::exp(-pair.eigenvalue * T);
        for (const auto& f : pair.functions) {
            cd coef = 0.0;
            for (size_t j = 0; j < grid.size(); ++j)
                coef += weight(j) * std::conj(f.value(grid[j])) * psi0[j];
            coef *= damp;
            for (size_t i = 0; i < grid.size(); ++i)
                out[i] += coef * f.value(grid[i]);
        }
    }
    return out;
}

std::string spectrum_to_json(const Spectrum& spec) {
    nlohmann::json j;
    j["domain"] = domain_name(Domain::UnitInterval);
    j["levels"] = nlohmann::json::array();
    const int grid_n = 257;
    for (const auto& pair : spec.pairs) {
        nlohmann::json lvl;
        lvl["eigenvalue"] = pair.eigenvalue;
        lvl["multiplicity"] = pair.multiplicity;
        lvl["eigenfunctions"] = nlohmann::json::array();
        for (const auto& f : pair.functions) {
            nlohmann::json samples = nlohmann::json::array();
            for (int i = 0; i < grid_n; ++i) {
                double x = static_cast<double>(i) / (grid_n - 1);
                cd v = f.value(x);
                samples.push_back({v.real(), v.imag()});
            }
            lvl["eigenfunctions"].push_back({{"grid_points", grid_n},
                                             {"samples", samples}});
        }
        j["levels"].push_back(lvl);
    }
    return j.dump(2);
}

} // namespace qbound
