#include "qbound/bc.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>

namespace qbound {

namespace {

const double kUnitaryTol = 1e-12;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

BoundaryUnitary::BoundaryUnitary(Domain domain, Eigen::MatrixXcd u)
    : domain_(domain), u_(std::move(u)) {
    const int n = boundary_count(domain_);
    if (u_.rows() != n || u_.cols() != n)
        throw IncompatibleDomainError(
            "boundary matrix must be " + std::to_string(n) + "x" + std::to_string(n) +
            " on " + domain_name(domain_));
    Eigen::MatrixXcd dev = u_ * u_.adjoint() - Eigen::MatrixXcd::Identity(n, n);
    if (dev.cwiseAbs().maxCoeff() > kUnitaryTol)
        throw NonUnitaryError("boundary matrix deviates from unitarity by " +
                              fmt_double(dev.cwiseAbs().maxCoeff()));
}

BoundaryUnitary to_unitary(const NamedBC& bc, Domain domain) {
    using Tag = NamedBC::Tag;
    const cd I(0.0, 1.0);
    const bool interval = domain == Domain::UnitInterval;

    auto require_interval = [&](const char* name) {
        if (!interval)
            throw IncompatibleDomainError(std::string(name) + " lives on the unit interval");
    };

    switch (bc.tag) {
    case Tag::Neumann: {
        int n = boundary_count(domain);
        return BoundaryUnitary(domain, Eigen::MatrixXcd::Identity(n, n));
    }
    case Tag::Dirichlet: {
        int n = boundary_count(domain);
        return BoundaryUnitary(domain, -Eigen::MatrixXcd::Identity(n, n));
    }
    case Tag::RobinHalfLine: {
        if (domain != Domain::HalfLine)
            throw IncompatibleDomainError("robin lives on the half-line");
        Eigen::MatrixXcd u(1, 1);
        u(0, 0) = std::exp(I * bc.param);
        return BoundaryUnitary(domain, u);
    }
    case Tag::Periodic: {
        require_interval("periodic");
        Eigen::MatrixXcd u(2, 2);
        u << 0, 1, 1, 0;
        return BoundaryUnitary(domain, u);
    }
    case Tag::PseudoPeriodic: {
        require_interval("pseudo-periodic");
        Eigen::MatrixXcd u(2, 2);
        u << 0, std::exp(-I * bc.param), std::exp(I * bc.param), 0;
        return BoundaryUnitary(domain, u);
    }
    case Tag::QuasiPeriodic: {
        require_interval("quasi-periodic");
        Eigen::MatrixXcd u(2, 2);
        u << std::cos(bc.param), std::sin(bc.param),
             std::sin(bc.param), -std::cos(bc.param);
        return BoundaryUnitary(domain, u);
    }
    case Tag::DeltaPoint: {
        require_interval("delta-point");
        // Strength a of the point potential, for H = -(1/2) d^2/dx^2 + a delta.
        // The derivative jump it induces is psi'(0+) - psi'(1-) = 2 a psi, which
        // corresponds to the glued-endpoint unitary below.
        const double g = 2.0 * bc.param;
        Eigen::MatrixXcd u(2, 2);
        u << I * g, 2.0, 2.0, I * g;
        u /= cd(2.0, -g);
        return BoundaryUnitary(domain, u);
    }
    case Tag::Custom: {
        if (!bc.custom)
            throw UsageError("custom bc carries no matrix");
        return BoundaryUnitary(domain, *bc.custom);
    }
    }
    throw UsageError("unknown bc tag");
}

double bc_residual(const BoundaryUnitary& u, const BoundaryData& data) {
    if (data.domain != u.domain())
        throw IncompatibleDomainError("boundary data domain does not match bc domain");
    const int n = u.dim();
    if (data.value.size() != n || data.normal_derivative.size() != n)
        throw UsageError("boundary data has wrong length");
    const cd I(0.0, 1.0);
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    Eigen::VectorXcd r = (id - u.matrix()) * data.value -
                         I * (id + u.matrix()) * data.normal_derivative;
    return r.cwiseAbs().maxCoeff();
}

bool satisfies_bc(const BoundaryUnitary& u, const BoundaryData& data, double tol) {
    return bc_residual(u, data) <= tol;
}

namespace {

double parse_param(const std::string& text, const std::string& prefix,
                   const std::string& key) {
    // Expect "<prefix>:<key>=<float>".
    std::string rest = text.substr(prefix.size());
    if (rest.empty() || rest[0] != ':')
        throw UsageError("expected '" + prefix + ":" + key + "=<float>', got '" + text + "'");
    rest = rest.substr(1);
    const std::string want = key + "=";
    if (rest.rfind(want, 0) != 0)
        throw UsageError("expected '" + prefix + ":" + key + "=<float>', got '" + text + "'");
    const std::string num = rest.substr(want.size());
    try {
        size_t pos = 0;
        double v = std::stod(num, &pos);
        if (pos != num.size()) throw std::invalid_argument(num);
        return v;
    } catch (const std::exception&) {
        throw UsageError("bad float '" + num + "' in bc '" + text + "'");
    }
}

NamedBC parse_custom(const std::string& text) {
    const std::string body = text.substr(std::string("custom:").size());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad custom matrix: ") + e.what());
    }
    if (!j.is_array() || (j.size() != 1 && j.size() != 4))
        throw UsageError("custom matrix needs 1 or 4 [re,im] entries, row-major");
    std::vector<cd> entries;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw UsageError("custom matrix entries must be [re,im] pairs");
        entries.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    const int n = entries.size() == 1 ? 1 : 2;
    Eigen::MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            m(r, c) = entries[r * n + c];
    return NamedBC::custom_matrix(m);
}

} // namespace

NamedBC parse_bc(const std::string& text) {
    if (text == "neumann") return NamedBC::neumann();
    if (text == "dirichlet") return NamedBC::dirichlet();
    if (text == "periodic") return NamedBC::periodic();
    if (text.rfind("robin", 0) == 0)
        return NamedBC::robin(parse_param(text, "robin", "alpha"));
    if (text.rfind("pseudo", 0) == 0)
        return NamedBC::pseudo_periodic(parse_param(text, "pseudo", "eps"));
    if (text.rfind("quasi", 0) == 0)
        return NamedBC::quasi_periodic(parse_param(text, "quasi", "alpha"));
    if (text.rfind("delta", 0) == 0)
        return NamedBC::delta_point(parse_param(text, "delta", "a"));
    if (text.rfind("custom:", 0) == 0)
        return parse_custom(text);
    throw UsageError("unknown bc '" + text + "' (see bc-list)");
}

std::string format_bc(const NamedBC& bc) {
    using Tag = NamedBC::Tag;
    switch (bc.tag) {
    case Tag::Neumann: return "neumann";
    case Tag::Dirichlet: return "dirichlet";
    case Tag::RobinHalfLine: return "robin:alpha=" + fmt_double(bc.param);
    case Tag::Periodic: return "periodic";
    case Tag::PseudoPeriodic: return "pseudo:eps=" + fmt_double(bc.param);
    case Tag::QuasiPeriodic: return "quasi:alpha=" + fmt_double(bc.param);
    case Tag::DeltaPoint: return "delta:a=" + fmt_double(bc.param);
    case Tag::Custom: {
        std::string out = "custom:[";
        const auto& m = *bc.custom;
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) {
                if (r + c > 0) out += ",";
                out += "[" + fmt_double(m(r, c).real()) + "," + fmt_double(m(r, c).imag()) + "]";
            }
        return out + "]";
    }
    }
    return "?";
}

std::vector<BcCatalogEntry> bc_catalog() {
    return {
        {"neumann", "halfline, interval", "U = I, psi' = 0 at the boundary"},
        {"dirichlet", "halfline, interval", "U = -I, psi = 0 at the boundary"},
        {"robin:alpha=<f>", "halfline", "U = e^{i alpha}, psi'(0) = tan(alpha/2) psi(0)"},
        {"periodic", "interval", "U = sigma_x, psi and psi' match across 0 ~ 1"},
        {"pseudo:eps=<f>", "interval", "psi(1) = e^{i eps} psi(0), psi'(1) = e^{i eps} psi'(0)"},
        {"quasi:alpha=<f>", "interval", "psi(1) = tan(alpha/2) psi(0), psi'(1) = cot(alpha/2) psi'(0)"},
        {"delta:a=<f>", "interval", "delta potential of strength a at the glued point 0 ~ 1"},
        {"custom:[[re,im],...]", "halfline, interval", "explicit unitary, 1 or 4 row-major entries"},
    };
}

} // namespace qbound
