// Command line front end: resolvents, spectra, Euclidean kernels and packet
// evolution for -(1/2) d^2/dx^2 with unitary boundary conditions.
//
// Conventions: complex values are "re,im" pairs, point lists are either a
// single value or "start:stop:count". Default output is CSV on stdout;
// --format json and --out <path> override. Exit codes: 0 success, 1 bad
// usage, 2 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qbound/bc.hpp"
#include "qbound/path_mc.hpp"
#include "qbound/propagator.hpp"
#include "qbound/resolvent.hpp"
#include "qbound/spectral.hpp"
#include "qbound/types.hpp"

namespace {

using namespace qbound;
using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string("bad ") + what + " '" + s + "'");
    }
}

cd parse_complex(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) return {parse_double(s, "number"), 0.0};
    return {parse_double(s.substr(0, comma), "real part"),
            parse_double(s.substr(comma + 1), "imaginary part")};
}

// "v" or "start:stop:count".
std::vector<double> parse_points(const std::string& s, const char* what) {
    auto c1 = s.find(':');
    if (c1 == std::string::npos) return {parse_double(s, what)};
    auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw UsageError(std::string(what) + " list must be '<v>' or 'start:stop:count', got '" + s + "'");
    double a = parse_double(s.substr(0, c1), what);
    double b = parse_double(s.substr(c1 + 1, c2 - c1 - 1), what);
    long n = std::lround(parse_double(s.substr(c2 + 1), what));
    if (n < 1) throw UsageError(std::string(what) + " grid count must be >= 1");
    std::vector<double> out;
    for (long i = 0; i < n; ++i)
        out.push_back(n == 1 ? a : a + (b - a) * i / double(n - 1));
    return out;
}

Domain parse_domain(const std::string& s) {
    if (s == "halfline") return Domain::HalfLine;
    if (s == "interval") return Domain::UnitInterval;
    throw UsageError("domain must be 'halfline' or 'interval', got '" + s + "'");
}

// Writes the collected report either as CSV or as a JSON document with
// metadata, to stdout or a file.
struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    json meta;

    void add_row(std::initializer_list<std::string> cells) { rows.emplace_back(cells); }

    std::string render(const std::string& format) const {
        if (format == "csv") {
            std::string out;
            for (size_t i = 0; i < columns.size(); ++i)
                out += (i ? "," : "") + columns[i];
            out += "\n";
            for (const auto& row : rows) {
                for (size_t i = 0; i < row.size(); ++i)
                    out += (i ? "," : "") + row[i];
                out += "\n";
            }
            return out;
        }
        if (format == "json") {
            json doc = meta;
            doc["rows"] = json::array();
            for (const auto& row : rows) {
                json r;
                for (size_t i = 0; i < row.size() && i < columns.size(); ++i) {
                    try {
                        size_t pos = 0;
                        double v = std::stod(row[i], &pos);
                        if (pos == row[i].size()) {
                            r[columns[i]] = v;
                            continue;
                        }
                    } catch (const std::exception&) {
                    }
                    r[columns[i]] = row[i];
                }
                doc["rows"].push_back(std::move(r));
            }
            return doc.dump(2) + "\n";
        }
        throw UsageError("format must be csv or json, got '" + format + "'");
    }
};

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw UsageError("cannot open '" + out_path + "' for writing");
    out << text;
}

struct Options {
    std::string bc_text = "neumann";
    std::string domain_text = "interval";
    std::string method = "auto";
    std::string format = "csv";
    std::string out_path;
    std::string x_spec = "0.3";
    std::string y_spec = "0.6";
    std::string T_spec = "1.0";
    std::vector<std::string> z_specs;
    std::string methods_spec = "auto";
    int count = 10;
    int levels = 40;
    double kappa_max = 50.0;
    double tol = 1e-6;
    std::string json_path;
    long long paths = 100000;
    int steps = 64;
    std::uint64_t seed = 1;
    double x0 = 0.5, k0 = 0.0, sigma = 0.1;
    int grid_n = 513;
    double x_max = 0.0;  // 0 = auto
};

ResolventEval pick_resolvent(const NamedBC& bc, Domain domain, cd z,
                             const std::string& method) {
    if (method == "closed") return closed_form_resolvent(bc, domain, z);
    if (method == "krein") return krein_resolvent(to_unitary(bc, domain), z);
    if (method != "auto")
        throw UsageError("resolvent method must be auto, closed or krein");
    if (has_closed_form(bc)) {
        try {
            return closed_form_resolvent(bc, domain, z);
        } catch (const NoClosedFormError&) {
        } catch (const IncompatibleDomainError&) {
        }
    }
    return krein_resolvent(to_unitary(bc, domain), z);
}

double rightmost_pole(const NamedBC& bc, Domain domain) {
    BoundStateReport report = find_bound_states(bc, domain);
    double pole = 0.0;
    for (double p : report.pole_z) pole = std::max(pole, p);
    return pole;
}

struct KernelValue {
    cd value;
    double std_error = 0.0;  // only for mc
    long long n_paths = 0;
};

using KernelFn = std::function<KernelValue(double, double)>;

// Build a per-point kernel evaluator with the expensive parts (spectrum
// solve, bound-state scan) hoisted out of the grid loop.
KernelFn kernel_method(const NamedBC& bc, Domain domain, const std::string& method,
                       double T, const Options& opt) {
    if (method == "images") {
        // Probe availability once so unsupported conditions fail at setup.
        if (!has_image_form(bc, domain))
            throw NoImageFormError("no image representation for " + format_bc(bc));
        return [=](double x, double y) {
            return KernelValue{image_sum_kernel(bc, domain, T, x, y)};
        };
    }
    if (method == "spectral") {
        if (domain != Domain::UnitInterval)
            throw MethodUnavailableError("spectral route needs the interval's discrete spectrum");
        auto spec = std::make_shared<Spectrum>(solve_spectrum(bc, opt.levels, opt.kappa_max));
        return [=](double x, double y) {
            return KernelValue{spectral_heat_kernel(*spec, T, x, y, 1e-12)};
        };
    }
    if (method == "laplace") {
        double pole = rightmost_pole(bc, domain);
        auto r = std::make_shared<ResolventEval>(
            pick_resolvent(bc, domain, cd(std::max(pole + 1.0, 4.0 / T), 0.0), "auto"));
        return [=](double x, double y) {
            return KernelValue{inverse_laplace_kernel(*r, T, x, y, pole)};
        };
    }
    if (method == "mc") {
        // Probe availability once with a cheap configuration.
        McConfig probe{T, 0.25, 0.25, 1, 2, 1};
        mc_kernel(bc, domain, probe);
        return [=](double x, double y) {
            McConfig cfg{T, x, y, opt.paths, opt.steps, opt.seed};
            McEstimate e = mc_kernel(bc, domain, cfg);
            return KernelValue{e.mean, e.std_error, e.n_paths};
        };
    }
    throw UsageError("kernel method must be images, spectral, laplace or mc");
}

std::string mc_method_tag(const NamedBC& bc, Domain domain) {
    switch (bc.tag) {
    case NamedBC::Tag::Dirichlet: return "absorbing-bridge";
    case NamedBC::Tag::Neumann:
        return domain == Domain::HalfLine ? "reflecting-bridge" : "image-sampling";
    default: return "winding-sampling";
    }
}

void cmd_bc_list() {
    std::printf("%-24s %-20s %s\n", "syntax", "domains", "description");
    for (const auto& e : bc_catalog())
        std::printf("%-24s %-20s %s\n", e.syntax.c_str(), e.domains.c_str(),
                    e.description.c_str());
}

void cmd_resolvent(const Options& opt) {
    NamedBC bc = parse_bc(opt.bc_text);
    Domain domain = parse_domain(opt.domain_text);
    std::vector<cd> zs;
    for (const auto& s : opt.z_specs) zs.push_back(parse_complex(s));
    if (zs.empty()) zs.push_back(cd(1.0, 0.0));
    std::vector<double> xs = parse_points(opt.x_spec, "x");
    std::vector<double> ys = parse_points(opt.y_spec, "y");

    Report rep;
    rep.columns = {"x", "y", "z_re", "z_im", "re", "im"};
    rep.meta = {{"domain", domain_name(domain)}, {"bc", format_bc(bc)},
                {"method", opt.method}};
    for (cd z : zs) {
        ResolventEval r = pick_resolvent(bc, domain, z, opt.method);
        for (double x : xs)
            for (double y : ys) {
                cd v = r(x, y, SpectralParameter(z));
                rep.add_row({fmt(x), fmt(y), fmt(z.real()), fmt(z.imag()),
                             fmt(v.real()), fmt(v.imag())});
            }
    }
    emit(rep.render(opt.format), opt.out_path);
}

void cmd_spectrum(const Options& opt) {
    NamedBC bc = parse_bc(opt.bc_text);
    Spectrum spec = solve_spectrum(bc, opt.count, opt.kappa_max);
    if (opt.format == "json") {
        json doc = json::parse(spectrum_to_json(spec));
        doc["bc"] = format_bc(bc);
        emit(doc.dump(2) + "\n", opt.out_path);
    } else {
        Report rep;
        rep.columns = {"index", "eigenvalue", "multiplicity"};
        int idx = 0;
        for (const auto& p : spec.pairs) {
            rep.add_row({std::to_string(idx), fmt(p.eigenvalue),
                         std::to_string(p.multiplicity)});
            idx += p.multiplicity;
        }
        emit(rep.render("csv"), opt.out_path);
    }
    if (!opt.json_path.empty()) {
        json doc = json::parse(spectrum_to_json(spec));
        doc["bc"] = format_bc(bc);
        if (opt.json_path == "-") {
            std::printf("%s\n", doc.dump(2).c_str());
        } else {
            std::ofstream out(opt.json_path);
            if (!out) throw UsageError("cannot open '" + opt.json_path + "' for writing");
            out << doc.dump(2) << "\n";
        }
    }
}

void cmd_kernel(const Options& opt) {
    NamedBC bc = parse_bc(opt.bc_text);
    Domain domain = parse_domain(opt.domain_text);
    std::string method = opt.method;
    if (method == "auto") method = has_image_form(bc, domain) ? "images" : "laplace";
    std::vector<double> xs = parse_points(opt.x_spec, "x");
    std::vector<double> ys = parse_points(opt.y_spec, "y");
    std::vector<double> Ts = parse_points(opt.T_spec, "T");

    Report rep;
    rep.columns = {"x", "y", "T", "re", "im"};
    rep.meta = {{"domain", domain_name(domain)}, {"bc", format_bc(bc)},
                {"method", method}};
    for (double T : Ts) {
        KernelFn eval = kernel_method(bc, domain, method, T, opt);
        for (double x : xs)
            for (double y : ys) {
                KernelValue v = eval(x, y);
                rep.add_row({fmt(x), fmt(y), fmt(T), fmt(v.value.real()),
                             fmt(v.value.imag())});
            }
    }
    emit(rep.render(opt.format), opt.out_path);
}

void cmd_mc(const Options& opt) {
    NamedBC bc = parse_bc(opt.bc_text);
    Domain domain = parse_domain(opt.domain_text);
    double x = parse_points(opt.x_spec, "x").at(0);
    double y = parse_points(opt.y_spec, "y").at(0);
    double T = parse_points(opt.T_spec, "T").at(0);
    McConfig cfg{T, x, y, opt.paths, opt.steps, opt.seed};
    McEstimate e = mc_kernel(bc, domain, cfg);
    if (opt.format == "json") {
        json doc = {{"method", mc_method_tag(bc, domain)},
                    {"bc", format_bc(bc)},
                    {"domain", domain_name(domain)},
                    {"x", x},
                    {"y", y},
                    {"T", T},
                    {"mean_re", e.mean.real()},
                    {"mean_im", e.mean.imag()},
                    {"std_error", e.std_error},
                    {"n_paths", e.n_paths},
                    {"n_killed", e.n_killed},
                    {"n_steps", cfg.n_steps},
                    {"seed", cfg.seed}};
        emit(doc.dump(2) + "\n", opt.out_path);
        return;
    }
    Report rep;
    rep.columns = {"x", "y", "T", "re", "im", "std_error", "n_paths", "n_killed"};
    rep.add_row({fmt(x), fmt(y), fmt(T), fmt(e.mean.real()), fmt(e.mean.imag()),
                 fmt(e.std_error), std::to_string(e.n_paths),
                 std::to_string(e.n_killed)});
    emit(rep.render("csv"), opt.out_path);
}

void cmd_compare(const Options& opt) {
    NamedBC bc = parse_bc(opt.bc_text);
    Domain domain = parse_domain(opt.domain_text);
    double T = parse_points(opt.T_spec, "T").at(0);
    std::vector<double> xs = parse_points(opt.x_spec, "x");
    std::vector<double> ys = parse_points(opt.y_spec, "y");

    std::vector<std::string> wanted;
    if (opt.methods_spec == "auto") {
        wanted = {"images", "spectral", "laplace", "mc"};
    } else {
        std::string rest = opt.methods_spec;
        while (!rest.empty()) {
            auto comma = rest.find(',');
            wanted.push_back(rest.substr(0, comma));
            rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
        }
    }

    struct Route {
        std::string name;
        KernelFn eval;
    };
    std::vector<Route> routes;
    std::vector<std::string> skipped;
    for (const auto& name : wanted) {
        try {
            routes.push_back({name, kernel_method(bc, domain, name, T, opt)});
        } catch (const UsageError& e) {
            if (opt.methods_spec != "auto") throw;
            skipped.push_back(name + " (" + e.what() + ")");
        }
    }
    if (routes.size() < 2)
        throw MethodUnavailableError(
            "compare needs at least 2 routes for " + format_bc(bc) + " on " +
            domain_name(domain) + "; available routes were: " +
            (routes.empty() ? std::string("none") : routes[0].name));

    std::printf("bc=%s domain=%s T=%s\n", format_bc(bc).c_str(),
                domain_name(domain), fmt(T).c_str());
    for (const auto& s : skipped)
        std::printf("skipped: %s\n", s.c_str());
    std::printf("%-8s %-8s %-10s %-26s %-26s %s\n", "x", "y", "method", "re", "im",
                "note");

    double max_abs = 0.0, max_rel = 0.0, max_mc_sigma = 0.0;
    bool have_mc = false;
    for (double x : xs)
        for (double y : ys) {
            std::vector<std::pair<std::string, KernelValue>> vals;
            for (const auto& route : routes) {
                KernelValue v = route.eval(x, y);
                std::string note;
                if (route.name == "mc")
                    note = "std_error=" + fmt(v.std_error);
                std::printf("%-8s %-8s %-10s %-26s %-26s %s\n", fmt(x).c_str(),
                            fmt(y).c_str(), route.name.c_str(),
                            fmt(v.value.real()).c_str(), fmt(v.value.imag()).c_str(),
                            note.c_str());
                vals.emplace_back(route.name, v);
            }
            const KernelValue* ref = nullptr;
            for (const auto& [name, v] : vals)
                if (name != "mc") { ref = &v; break; }
            for (size_t i = 0; i < vals.size(); ++i) {
                if (vals[i].first == "mc") {
                    if (ref) {
                        double dev = std::abs(vals[i].second.value - ref->value);
                        double sig = std::max(vals[i].second.std_error, 1e-300);
                        max_mc_sigma = std::max(max_mc_sigma, dev / sig);
                        have_mc = true;
                    }
                    continue;
                }
                for (size_t j = i + 1; j < vals.size(); ++j) {
                    if (vals[j].first == "mc") continue;
                    double d = std::abs(vals[i].second.value - vals[j].second.value);
                    double scale = std::max(std::abs(vals[i].second.value),
                                            std::abs(vals[j].second.value));
                    max_abs = std::max(max_abs, d);
                    if (scale > 0.0) max_rel = std::max(max_rel, d / scale);
                }
            }
        }

    bool ok = max_abs <= opt.tol || max_rel <= opt.tol;
    std::printf("deterministic: max abs diff %s, max rel diff %s, tol %s\n",
                fmt(max_abs).c_str(), fmt(max_rel).c_str(), fmt(opt.tol).c_str());
    if (have_mc) {
        std::printf("mc: max deviation %s sigma (3 allowed)\n", fmt(max_mc_sigma).c_str());
        if (max_mc_sigma > 3.0) ok = false;
    }
    std::printf("status: %s\n", ok ? "PASS" : "FAIL");
    if (!ok) throw NumericError("kernel routes disagree beyond tolerance");
}

void cmd_evolve(const Options& opt) {
    NamedBC bc = parse_bc(opt.bc_text);
    Domain domain = parse_domain(opt.domain_text);
    double T = parse_points(opt.T_spec, "T").at(0);
    double hi = 1.0;
    if (domain == Domain::HalfLine)
        hi = opt.x_max > 0.0 ? opt.x_max
                             : opt.x0 + 8.0 * opt.sigma + 6.0 * std::sqrt(T) + 1.0;
    std::vector<double> grid = uniform_grid(0.0, hi, opt.grid_n);
    std::vector<cd> psi0 = sample_packet({opt.x0, opt.k0, opt.sigma}, grid);

    std::string method = opt.method;
    if (method == "auto") method = has_image_form(bc, domain) ? "images" : "laplace";
    std::vector<cd> psi;
    if (method == "spectral") {
        if (domain != Domain::UnitInterval)
            throw MethodUnavailableError("spectral route needs the interval's discrete spectrum");
        Spectrum spec = solve_spectrum(bc, opt.levels, opt.kappa_max);
        psi = evolve_with_spectrum(spec, grid, psi0, T);
    } else if (method == "images" || method == "laplace") {
        KernelFn eval = kernel_method(bc, domain, method, T, opt);
        psi = evolve_packet(
            [&](double x, double y) { return eval(x, y).value; }, grid, psi0);
    } else {
        throw UsageError("evolve method must be auto, images, laplace or spectral");
    }

    Report rep;
    rep.columns = {"x", "re", "im"};
    rep.meta = {{"domain", domain_name(domain)}, {"bc", format_bc(bc)},
                {"method", method}, {"T", T}};
    for (size_t i = 0; i < grid.size(); ++i)
        rep.add_row({fmt(grid[i]), fmt(psi[i].real()), fmt(psi[i].imag())});
    emit(rep.render(opt.format), opt.out_path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"resolvents, spectra and Euclidean propagators for a free "
                 "particle with unitary boundary conditions"};
    app.require_subcommand(1);
    Options opt;

    app.add_subcommand("bc-list", "list boundary condition syntax")
        ->callback([] { cmd_bc_list(); });

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--bc", opt.bc_text, "boundary condition (see bc-list)");
        cmd->add_option("--domain", opt.domain_text, "halfline or interval");
        cmd->add_option("--format", opt.format, "csv or json");
        cmd->add_option("--out", opt.out_path, "write output to a file");
    };

    auto* resolvent = app.add_subcommand("resolvent", "evaluate a resolvent kernel");
    add_common(resolvent);
    resolvent->add_option("--x", opt.x_spec, "x point or start:stop:count");
    resolvent->add_option("--y", opt.y_spec, "y point or start:stop:count");
    resolvent->add_option("--z", opt.z_specs, "spectral parameter 're,im' (repeatable)");
    resolvent->add_option("--method", opt.method, "auto, closed or krein");
    resolvent->callback([&] { cmd_resolvent(opt); });

    auto* spectrum = app.add_subcommand("spectrum", "solve interval eigenvalues");
    spectrum->add_option("--bc", opt.bc_text, "boundary condition (see bc-list)");
    spectrum->add_option("--count", opt.count, "levels to find (with multiplicity)");
    spectrum->add_option("--kappa-max", opt.kappa_max, "negative-level search reach");
    spectrum->add_option("--format", opt.format, "csv or json");
    spectrum->add_option("--out", opt.out_path, "write output to a file");
    spectrum->add_option("--json", opt.json_path,
                         "also write eigenfunction samples ('-' = stdout)");
    spectrum->callback([&] { cmd_spectrum(opt); });

    auto* kernel = app.add_subcommand("kernel", "Euclidean kernel on a point grid");
    add_common(kernel);
    kernel->add_option("--T", opt.T_spec, "time point or start:stop:count");
    kernel->add_option("--x", opt.x_spec, "x point or start:stop:count");
    kernel->add_option("--y", opt.y_spec, "y point or start:stop:count");
    kernel->add_option("--method", opt.method, "auto, images, spectral, laplace or mc");
    kernel->add_option("--levels", opt.levels, "spectral route: levels to sum");
    kernel->add_option("--paths", opt.paths, "mc route: path count");
    kernel->add_option("--steps", opt.steps, "mc route: time steps");
    kernel->add_option("--seed", opt.seed, "mc route: stream seed");
    kernel->callback([&] { cmd_kernel(opt); });

    auto* mc = app.add_subcommand("mc", "Monte Carlo kernel estimate with errors");
    add_common(mc);
    mc->add_option("--T", opt.T_spec, "Euclidean time");
    mc->add_option("--x", opt.x_spec, "first point");
    mc->add_option("--y", opt.y_spec, "second point");
    mc->add_option("--paths", opt.paths, "path count");
    mc->add_option("--steps", opt.steps, "time steps per path");
    mc->add_option("--seed", opt.seed, "stream seed");
    mc->callback([&] { cmd_mc(opt); });

    auto* compare = app.add_subcommand("compare", "cross-check kernel routes");
    compare->add_option("--bc", opt.bc_text, "boundary condition (see bc-list)");
    compare->add_option("--domain", opt.domain_text, "halfline or interval");
    compare->add_option("--T", opt.T_spec, "Euclidean time");
    compare->add_option("--x", opt.x_spec, "x point or start:stop:count");
    compare->add_option("--y", opt.y_spec, "y point or start:stop:count");
    compare->add_option("--methods", opt.methods_spec,
                        "comma list of routes (default: all available)");
    compare->add_option("--tol", opt.tol, "deterministic agreement tolerance");
    compare->add_option("--levels", opt.levels, "spectral route: levels to sum");
    compare->add_option("--paths", opt.paths, "mc route: path count");
    compare->add_option("--steps", opt.steps, "mc route: time steps");
    compare->add_option("--seed", opt.seed, "mc route: stream seed");
    compare->callback([&] { cmd_compare(opt); });

    auto* evolve = app.add_subcommand("evolve", "apply e^{-TH} to a Gaussian packet");
    add_common(evolve);
    evolve->add_option("--T", opt.T_spec, "Euclidean time");
    evolve->add_option("--x0", opt.x0, "packet center");
    evolve->add_option("--k0", opt.k0, "packet momentum");
    evolve->add_option("--sigma", opt.sigma, "packet width");
    evolve->add_option("--grid-n", opt.grid_n, "grid points");
    evolve->add_option("--x-max", opt.x_max, "half-line grid cutoff (0 = auto)");
    evolve->add_option("--method", opt.method, "auto, images, laplace or spectral");
    evolve->add_option("--levels", opt.levels, "spectral route: levels to sum");
    evolve->callback([&] { cmd_evolve(opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
