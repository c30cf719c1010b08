#include "qbound/path_mc.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qbound {

namespace {

const long long kChunk = 4096;
const double kBoundaryTol = 1e-12;

double free_weight(double T, double dx) {
    return std::exp(-dx * dx / (2.0 * T)) / std::sqrt(2.0 * M_PI * T);
}

struct SplitMix {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform01() {  // (0, 1]
        return (next() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    double normal() {  // plain Box-Muller, cosine branch
        double u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

SplitMix path_stream(std::uint64_t seed, std::uint64_t path) {
    SplitMix mixer{seed};
    std::uint64_t a = mixer.next();
    mixer.state = a ^ (path * 0xd1b54a32d192ed03ull + 0x8bb84b93962eacc9ull);
    mixer.next();
    return mixer;
}

void check_config(const McConfig& cfg, Domain domain) {
    if (!(cfg.T > 0.0)) throw UsageError("T must be positive");
    if (cfg.n_paths < 1) throw UsageError("n_paths must be positive");
    if (cfg.n_steps < 2) throw UsageError("n_steps must be at least 2");
    if (!in_domain(domain, cfg.x) || !in_domain(domain, cfg.y))
        throw UsageError("x, y must lie in the domain");
}

bool on_boundary(Domain domain, double v) {
    if (v <= kBoundaryTol) return true;
    return domain == Domain::UnitInterval && v >= 1.0 - kBoundaryTol;
}

// Accumulate per-path complex samples in fixed-size chunks summed in index
// order; the reduction is the same no matter how the work is batched.
struct ChunkSum {
    double re = 0, im = 0, re2 = 0, im2 = 0;
    double c_re = 0, c_im = 0, c_re2 = 0, c_im2 = 0;
    long long n = 0, in_chunk = 0;

    void add(cd v) {
        c_re += v.real();
        c_im += v.imag();
        c_re2 += v.real() * v.real();
        c_im2 += v.imag() * v.imag();
        ++n;
        if (++in_chunk == kChunk) flush();
    }

    void flush() {
        re += c_re; im += c_im; re2 += c_re2; im2 += c_im2;
        c_re = c_im = c_re2 = c_im2 = 0;
        in_chunk = 0;
    }

    McEstimate finish() {
        flush();
        McEstimate e;
        e.n_paths = n;
        e.mean = cd(re / n, im / n);
        double var = 0.0;
        if (n > 1) {
            var = (re2 - re * re / n) / (n - 1) + (im2 - im * im / n) / (n - 1);
            var = std::max(var, 0.0);
        }
        e.std_error = std::sqrt(var / n);
        return e;
    }
};

// One exact bridge skeleton y -> x; returns the product of per-step
// non-crossing probabilities for the active faces, or 0 if the skeleton
// itself leaves the domain.
double bridge_survival(SplitMix& rng, Domain domain, const McConfig& cfg) {
    double dt = cfg.T / cfg.n_steps;
    double w = cfg.y;
    double weight = 1.0;
    for (int j = 0; j < cfg.n_steps; ++j) {
        double remaining = cfg.T - j * dt;
        double next_w;
        if (j + 1 == cfg.n_steps) {
            next_w = cfg.x;
        } else {
            double mean = w + (cfg.x - w) * dt / remaining;
            double var = dt * (remaining - dt) / remaining;
            next_w = mean + std::sqrt(var) * rng.normal();
        }
        if (!in_domain(domain, next_w) || on_boundary(domain, next_w)) return 0.0;
        double a0 = -2.0 * w * next_w / dt;
        weight *= a0 > -35.0 ? 1.0 - std::exp(a0) : 1.0;
        if (domain == Domain::UnitInterval) {
            double a1 = -2.0 * (1.0 - w) * (1.0 - next_w) / dt;
            weight *= a1 > -35.0 ? 1.0 - std::exp(a1) : 1.0;
        }
        w = next_w;
    }
    return weight;
}

// Discrete proposal over displacement indices with CDF inversion.
struct ImageProposal {
    std::vector<double> prob;    // normalized
    std::vector<double> cdf;

    explicit ImageProposal(const std::vector<double>& raw) {
        double total = 0.0;
        for (double v : raw) total += v;
        prob.resize(raw.size());
        cdf.resize(raw.size());
        double acc = 0.0;
        for (size_t i = 0; i < raw.size(); ++i) {
            prob[i] = raw[i] / total;
            acc += prob[i];
            cdf[i] = acc;
        }
        cdf.back() = 1.0;
    }

    size_t draw(double u) const {
        return std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    }
};

} // namespace

McEstimate mc_dirichlet_kernel(Domain domain, const McConfig& cfg) {
    check_config(cfg, domain);
    if (on_boundary(domain, cfg.x) || on_boundary(domain, cfg.y))
        throw EndpointOnBoundaryError("absorbing estimator needs interior endpoints");

    double g = free_weight(cfg.T, cfg.x - cfg.y);
    ChunkSum acc;
    long long killed = 0;
    for (long long i = 0; i < cfg.n_paths; ++i) {
        SplitMix rng = path_stream(cfg.seed, static_cast<std::uint64_t>(i));
        double s = bridge_survival(rng, domain, cfg);
        if (s == 0.0) ++killed;
        acc.add(cd(g * s, 0.0));
    }
    McEstimate e = acc.finish();
    e.n_killed = killed;
    return e;
}

McEstimate mc_neumann_kernel(Domain domain, const McConfig& cfg) {
    check_config(cfg, domain);

    if (domain == Domain::HalfLine) {
        // Reflection doubles the crossing sector: per path 2 - S, with
        // E[S] = P(bridge never touches 0). Boundary endpoints are fine:
        // every bridge then touches, S = 0, and the kernel is 2 G.
        double g = free_weight(cfg.T, cfg.x - cfg.y);
        ChunkSum acc;
        for (long long i = 0; i < cfg.n_paths; ++i) {
            SplitMix rng = path_stream(cfg.seed, static_cast<std::uint64_t>(i));
            double s = bridge_survival(rng, domain, cfg);
            acc.add(cd(g * (2.0 - s), 0.0));
        }
        return acc.finish();
    }

    // Interval: K = sum over reflected images x_img in {x + 2n, -x + 2n} of
    // the free Gaussian to y. Sample the image, reweight by the proposal.
    int n_max = static_cast<int>(std::ceil(4.5 * std::sqrt(cfg.T))) + 2;
    std::vector<double> target, disp;
    for (int n = -n_max; n <= n_max; ++n) {
        for (int sgn : {+1, -1}) {
            double d = sgn * cfg.x + 2.0 * n - cfg.y;
            disp.push_back(d);
            target.push_back(free_weight(cfg.T, d));
        }
    }
    // Widened proposal (doubled variance) keeps every sampled ratio finite
    // and the estimator honestly random.
    std::vector<double> raw(disp.size());
    for (size_t i = 0; i < disp.size(); ++i)
        raw[i] = free_weight(2.0 * cfg.T, disp[i]);
    ImageProposal proposal(raw);

    ChunkSum acc;
    for (long long i = 0; i < cfg.n_paths; ++i) {
        SplitMix rng = path_stream(cfg.seed, static_cast<std::uint64_t>(i));
        size_t idx = proposal.draw(rng.uniform01());
        acc.add(cd(target[idx] / proposal.prob[idx], 0.0));
    }
    return acc.finish();
}

McEstimate mc_winding_kernel(double eps, const McConfig& cfg) {
    check_config(cfg, Domain::UnitInterval);
    const cd I(0.0, 1.0);

    // Winding sectors n with displacement x - y + n inside the Gaussian
    // support; verify the dropped tail before trusting the truncation.
    double reach = 7.0 * std::sqrt(cfg.T) + 2.0;
    int n_lo = static_cast<int>(std::floor(-reach - (cfg.x - cfg.y)));
    int n_hi = static_cast<int>(std::ceil(reach - (cfg.x - cfg.y)));
    std::vector<int> winding;
    std::vector<double> target, raw;
    double total = 0.0;
    for (int n = n_lo; n <= n_hi; ++n) {
        double d = cfg.x - cfg.y + n;
        winding.push_back(n);
        target.push_back(free_weight(cfg.T, d));
        raw.push_back(free_weight(2.0 * cfg.T, d));
        total += target.back();
    }
    double omitted = 0.0;
    for (int k = 1; k <= 16; ++k) {
        omitted += free_weight(cfg.T, reach + k - 1.0);
        omitted += free_weight(cfg.T, -reach - k + 1.0);
    }
    if (omitted > 1e-12 * std::max(total, 1e-300))
        throw WindingTruncationError("winding truncation tail above 1e-12");

    ImageProposal proposal(raw);
    ChunkSum acc;
    for (long long i = 0; i < cfg.n_paths; ++i) {
        SplitMix rng = path_stream(cfg.seed, static_cast<std::uint64_t>(i));
        size_t idx = proposal.draw(rng.uniform01());
        cd phase = std::exp(-I * eps * static_cast<double>(winding[idx]));
        acc.add(target[idx] / proposal.prob[idx] * phase);
    }
    return acc.finish();
}

McEstimate mc_kernel(const NamedBC& bc, Domain domain, const McConfig& cfg) {
    switch (bc.tag) {
    case NamedBC::Tag::Dirichlet:
        return mc_dirichlet_kernel(domain, cfg);
    case NamedBC::Tag::Neumann:
        return mc_neumann_kernel(domain, cfg);
    case NamedBC::Tag::Periodic:
        if (domain != Domain::UnitInterval) break;
        return mc_winding_kernel(0.0, cfg);
    case NamedBC::Tag::PseudoPeriodic:
        if (domain != Domain::UnitInterval) break;
        return mc_winding_kernel(bc.param, cfg);
    default:
        break;
    }
    throw MethodUnavailableError("no Monte Carlo estimator for " + format_bc(bc) +
                                 " on " + domain_name(domain));
}

} // namespace qbound
