#include "dpistab/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpistab/dpi.hpp"
#include "dpistab/errors.hpp"
#include "dpistab/format.hpp"
#include "dpistab/pde.hpp"
#include "dpistab/perturbation.hpp"
#include "dpistab/series.hpp"

namespace dpistab::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

double parse_number(std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        throw DomainError("not a finite number: '" + std::string(text) + "'");
    }
    return v;
}

}  // namespace

std::vector<double> parse_range(std::string_view text) {
    const auto c1 = text.find(':');
    if (c1 == std::string_view::npos) {
        return {parse_number(text)};
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos) {
        throw DomainError("range must be start:stop:step, got '" + std::string(text) + "'");
    }
    const double start = parse_number(text.substr(0, c1));
    const double stop = parse_number(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse_number(text.substr(c2 + 1));
    if (!(step > 0.0)) {
        throw DomainError("range step must be positive in '" + std::string(text) + "'");
    }
    if (stop < start) {
        throw DomainError("empty range '" + std::string(text) + "'");
    }
    const double span = std::floor((stop - start) / step + 0.5);
    if (span > 1e7) {
        throw DomainError("range '" + std::string(text) + "' has too many points");
    }
    const auto count = static_cast<std::size_t>(span) + 1;
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] = start + static_cast<double>(k) * step;
    }
    return out;
}

namespace {

std::uint64_t default_max_iter() {
    const char* env = std::getenv("DPISTAB_MAX_ITER");
    if (env == nullptr || *env == '\0') {
        return IterationLimits{}.max_iter;
    }
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v == 0) {
        throw DomainError("DPISTAB_MAX_ITER must be a positive integer, got '" + std::string(s) + "'");
    }
    return v;
}

class Output {
public:
    Output(std::string command, const std::string& dir) : command_(std::move(command)), dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) {
            throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
        }
    }

    void param(const std::string& key, ordered_json value) { params_[key] = std::move(value); }

    void write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        std::ofstream f(p, std::ios::binary);
        f << content;
        if (!f) {
            throw std::runtime_error("cannot write '" + p.string() + "'");
        }
        outputs_.push_back(p.string());
    }

    void json(const std::string& name, const ordered_json& j) { write(name, j.dump(2) + "\n"); }

    void finish() {
        ordered_json m;
        m["command"] = command_;
        m["parameters"] = params_;
        m["tool_version"] = tool_version;
        m["outputs"] = outputs_;
        const fs::path p = dir_ / "manifest.json";
        std::ofstream f(p, std::ios::binary);
        f << m.dump(2) << "\n";
        if (!f) {
            throw std::runtime_error("cannot write '" + p.string() + "'");
        }
        for (const auto& o : outputs_) {
            std::cout << o << "\n";
        }
        std::cout << p.string() << "\n";
    }

private:
    std::string command_;
    fs::path dir_;
    ordered_json params_ = ordered_json::object();
    std::vector<std::string> outputs_;
};

ordered_json number(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return format_double(v);
}

struct BorderArgs {
    unsigned z = 1;
    std::string eps_hat;
    std::string scheme = "explicit";
};

void cmd_border(const BorderArgs& a, const std::string& dir) {
    const Scheme scheme = parse_scheme(a.scheme);
    const auto eps = parse_range(a.eps_hat);
    if (scheme == Scheme::Implicit && a.z != 1) {
        throw DomainError("implicit border is available for --z 1 only");
    }
    Output out("border", dir);
    out.param("z", a.z);
    out.param("eps_hat", a.eps_hat);
    out.param("scheme", a.scheme);
    std::ostringstream csv;
    if (scheme == Scheme::Explicit) {
        csv << "eps_hat,r_border\n";
        for (double e : eps) {
            csv << format_double(e) << ',' << format_double(explicit_border_r(e, a.z).r_max) << '\n';
        }
    } else {
        csv << "eps_hat,r_border,r_low,r_high\n";
        for (double e : eps) {
            const auto g = implicit_gap(e);
            csv << format_double(e) << ',' << format_double(g.r_low) << ',' << format_double(g.r_low) << ','
                << format_double(g.r_high) << '\n';
        }
    }
    out.write("border.csv", csv.str());
    out.finish();
}

struct ScanArgs {
    unsigned z = 1;
    std::string r;
    std::string eps_hat;
    std::string scheme = "explicit";
    double u0 = 1.0;
    std::uint64_t max_iter = 0;
};

void cmd_scan(const ScanArgs& a, const std::string& dir) {
    const Scheme scheme = parse_scheme(a.scheme);
    ScanOptions opt;
    opt.u0 = a.u0;
    opt.limits.max_iter = a.max_iter != 0 ? a.max_iter : default_max_iter();
    const auto grid = scan_region(parse_range(a.r), parse_range(a.eps_hat), a.z, scheme, opt);
    const auto t = grid.tally();

    Output out("scan", dir);
    out.param("z", a.z);
    out.param("r", a.r);
    out.param("eps_hat", a.eps_hat);
    out.param("scheme", a.scheme);
    out.param("u0", a.u0);
    out.param("max_iter", opt.limits.max_iter);
    out.param("isa", std::string(kernels::isa_name(opt.isa)));

    std::ostringstream csv;
    write_region_csv(csv, grid);
    out.write("region.csv", csv.str());

    ordered_json s;
    s["cells"] = t.cells;
    s["r_points"] = grid.r_axis.size();
    s["eps_hat_points"] = grid.eps_hat_axis.size();
    s["analytic_stable"] = t.analytic_stable;
    s["converged"] = t.converged;
    s["diverged"] = t.diverged;
    s["maxiter"] = t.max_iterations;
    s["singular"] = t.singular;
    s["disagreements"] = t.disagreements;
    out.json("summary.json", s);
    out.finish();
    std::cerr << "scan: " << t.cells << " cells, " << t.disagreements << " disagreements\n";
}

struct AmplitudeArgs {
    double r = 0.5;
    double u0 = 1.0;
    unsigned z = 1;
    std::size_t order = 8;
    std::size_t iterations = 10000;
    std::string scheme = "explicit";
};

void cmd_amplitudes(const AmplitudeArgs& a, const std::string& dir) {
    const Scheme scheme = parse_scheme(a.scheme);
    if (!std::isfinite(a.r) || !std::isfinite(a.u0) || a.u0 == 0.0) {
        throw DomainError("--r must be finite and --u0 finite and nonzero");
    }
    if (scheme == Scheme::Explicit && !(std::fabs(a.r) < 1.0)) {
        throw DomainError("explicit amplitudes converge only for |r| < 1 (got r = " + format_double(a.r) + ")");
    }
    if (scheme == Scheme::Implicit && a.z != 1) {
        throw DomainError("implicit amplitudes are available for --z 1 only");
    }
    if (a.iterations < 1) {
        throw DomainError("--iterations must be >= 1");
    }
    const AmplitudeTable table = scheme == Scheme::Explicit
                                     ? explicit_cascade(a.r, a.u0, a.z, a.order, a.iterations)
                                     : implicit_cascade(a.r, a.u0, a.order, a.iterations);
    Output out("amplitudes", dir);
    out.param("r", a.r);
    out.param("u0", a.u0);
    out.param("z", a.z);
    out.param("order", a.order);
    out.param("iterations", a.iterations);
    out.param("scheme", a.scheme);

    std::ostringstream csv;
    csv << "i,n_used,recursive,closed_form,rel_err\n";
    for (std::size_t i = 0; i <= a.order; ++i) {
        const auto st = settle(table, i);
        const double rec = table.normalized(i, a.iterations);
        const double cf = amplitude_closed_form(i, a.r, a.z);
        const double err = cf != 0.0 ? std::fabs(rec - cf) / std::fabs(cf) : std::fabs(rec - cf);
        csv << i << ',' << st.n_used << ',' << format_double(rec) << ',' << format_double(cf) << ','
            << format_double(err) << '\n';
    }
    out.write("amplitudes.csv", csv.str());
    out.finish();
}

struct PoissonArgs {
    std::size_t m = 100;
    double beta = 0.0;
    bool sweep = false;
    bool linear = false;
    std::string config;
    std::uint64_t max_iter = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw DomainError("cannot read config '" + path + "'");
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void cmd_poisson(const PoissonArgs& a, const std::string& dir, const CLI::App& sub) {
    PoissonRun run;
    run.residual = a.linear ? kernels::Residual::Linear : kernels::Residual::Nonlinear;
    run.max_iter = default_max_iter();
    bool have_beta = sub.count("--beta") > 0;
    if (!a.config.empty()) {
        const PoissonRun cfg = poisson_run_from_json(read_file(a.config));
        run.M = cfg.M;
        run.beta = cfg.beta;
        run.max_iter = cfg.max_iter;
        have_beta = true;
    } else {
        run.M = a.m;
        run.beta = a.beta;
    }
    if (a.max_iter != 0) {
        run.max_iter = a.max_iter;
    }
    if (a.sweep == have_beta) {
        throw DomainError("poisson needs exactly one of --beta (or --config) and --sweep");
    }

    Output out("poisson", dir);
    out.param("m", run.M);
    out.param("residual", a.linear ? "linear" : "nonlinear");
    out.param("max_iter", run.max_iter);
    if (!a.config.empty()) {
        out.param("config", a.config);
    }

    if (a.sweep) {
        CflSearch search;
        search.max_iter = run.max_iter;
        search.residual = run.residual;
        out.param("mode", "sweep");
        const auto unit = poisson_spectrum(run.M, 1.0);
        ordered_json j;
        j["M"] = run.M;
        j["residual"] = a.linear ? "linear" : "nonlinear";
        if (!a.linear) {
            j["analytic_bound"] = analytic_cfl_bound(run.M);
        }
        j["experimental_bound"] = experimental_cfl_bound(run.M, search);
        j["r_per_beta"] = unit.r;
        j["V0_per_beta"] = unit.V0;
        j["epsilon"] = unit.epsilon;
        j["eps_hat_per_beta"] = unit.eps_hat;
        j["true_radius_per_beta"] = unit.true_radius;
        out.json("bounds.json", j);
        out.finish();
        return;
    }

    out.param("mode", "single");
    out.param("beta", run.beta);
    run.record_history = true;
    const auto res = simulate_poisson(run);
    std::ostringstream csv;
    write_norm_history_csv(csv, res);
    out.write("history.csv", csv.str());
    ordered_json j;
    j["M"] = run.M;
    j["beta"] = run.beta;
    j["status"] = std::string(status_token(res.outcome.status));
    j["iterations"] = res.outcome.iterations_used;
    j["final_max_norm"] = number(res.outcome.final_value);
    out.json("result.json", j);
    out.finish();
    std::cerr << "poisson: " << status_token(res.outcome.status) << " after " << res.outcome.iterations_used
              << " iterations\n";
}

struct FourierArgs {
    std::vector<std::string> coeffs;
    std::vector<std::string> etas;
    double eps_hat = 0.0;
    unsigned dim = 0;
};

SymbolTerm parse_term(const std::string& text) {
    const auto c1 = text.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(',', c1 + 1);
    if (c2 == std::string::npos) {
        throw DomainError("--coeff must be l,m,value, got '" + text + "'");
    }
    const double l = parse_number(std::string_view(text).substr(0, c1));
    const double m = parse_number(std::string_view(text).substr(c1 + 1, c2 - c1 - 1));
    if (l < 1 || m < 1 || l != std::floor(l) || m != std::floor(m) || l > 64 || m > 64) {
        throw DomainError("--coeff indices l and m must be integers in 1..64, got '" + text + "'");
    }
    return {static_cast<unsigned>(l), static_cast<unsigned>(m), parse_number(std::string_view(text).substr(c2 + 1))};
}

void cmd_fourier(const FourierArgs& a, const std::string& dir) {
    std::vector<SymbolTerm> terms;
    unsigned d = a.dim;
    for (const auto& c : a.coeffs) {
        terms.push_back(parse_term(c));
        if (a.dim == 0) {
            d = std::max(d, terms.back().l);
        }
    }
    const FourierSymbol sym(d, terms);
    if (a.etas.size() != d) {
        throw DomainError("need one --eta range per dimension (" + std::to_string(d) + "), got " +
                          std::to_string(a.etas.size()));
    }
    std::vector<std::vector<double>> axes;
    std::size_t total = 1;
    for (const auto& e : a.etas) {
        axes.push_back(parse_range(e));
        total *= axes.back().size();
        if (total > 10000000) {
            throw DomainError("frequency grid too large");
        }
    }
    std::vector<std::vector<double>> grid;
    grid.reserve(total);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t n = 0; n < total; ++n) {
        std::vector<double> eta(d);
        for (unsigned l = 0; l < d; ++l) {
            eta[l] = axes[l][idx[l]];
        }
        grid.push_back(std::move(eta));
        for (unsigned l = d; l-- > 0;) {
            if (++idx[l] < axes[l].size()) {
                break;
            }
            idx[l] = 0;
        }
    }
    const auto res = fourier_stability(sym, grid, a.eps_hat, true);

    Output out("fourier", dir);
    out.param("coeff", a.coeffs);
    out.param("eta", a.etas);
    out.param("eps_hat", a.eps_hat);
    out.param("dim", d);
    std::ostringstream csv;
    write_fourier_csv(csv, res, d);
    out.write("contour.csv", csv.str());
    ordered_json j;
    j["r"] = res.r;
    j["theta"] = number(res.theta);
    j["verdict"] = std::string(verdict_token(res.verdict));
    j["singular"] = res.singular;
    out.json("summary.json", j);
    out.finish();
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Nonlinear stability analysis of discrete Picard iteration"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);
    std::string dir = ".";
    app.add_option("--output-dir,-o", dir, "Directory for data files and manifest.json");

    BorderArgs border;
    auto* sb = app.add_subcommand("border", "Stability border r(eps_hat)");
    sb->add_option("--z", border.z, "Nonlinearity degree")->check(CLI::Range(1u, 64u));
    sb->add_option("--eps-hat", border.eps_hat, "Range start:stop:step or value")->required();
    sb->add_option("--scheme", border.scheme, "explicit or implicit");

    ScanArgs scan;
    auto* ss = app.add_subcommand("scan", "Analytic vs brute-force stability over an (eps_hat, r) grid");
    ss->add_option("--z", scan.z, "Nonlinearity degree")->check(CLI::Range(1u, 64u));
    ss->add_option("--r", scan.r, "r axis range")->required();
    ss->add_option("--eps-hat", scan.eps_hat, "eps_hat axis range")->required();
    ss->add_option("--scheme", scan.scheme, "explicit or implicit");
    ss->add_option("--u0", scan.u0, "Initial value");
    ss->add_option("--max-iter", scan.max_iter, "Iteration budget per cell")->check(CLI::PositiveNumber);

    AmplitudeArgs amp;
    auto* sa = app.add_subcommand("amplitudes", "Perturbation amplitudes vs closed form");
    sa->add_option("--r", amp.r, "Linear stability number");
    sa->add_option("--u0", amp.u0, "Initial value");
    sa->add_option("--z", amp.z, "Nonlinearity degree")->check(CLI::Range(1u, 64u));
    sa->add_option("--order", amp.order, "Highest order i")->check(CLI::Range(0, 64));
    sa->add_option("--iterations", amp.iterations, "Iterations n")->check(CLI::Range(1, 10000000));
    sa->add_option("--scheme", amp.scheme, "explicit or implicit");

    PoissonArgs poisson;
    auto* sp = app.add_subcommand("poisson", "Nonlinear Poisson example");
    auto* m_opt = sp->add_option("--m", poisson.m, "Interior grid points")->check(CLI::Range(2, 1000000));
    auto* b_opt = sp->add_option("--beta", poisson.beta, "CFL number dt/dx^2")->check(CLI::PositiveNumber);
    auto* sw_opt = sp->add_flag("--sweep", poisson.sweep, "Analytic and experimental CFL bounds");
    sp->add_option("--config", poisson.config, "JSON {M, beta, max_iter}")->excludes(m_opt)->excludes(b_opt)->excludes(sw_opt);
    sp->add_flag("--linear", poisson.linear, "Use the linear residual u instead of u + u^2");
    sp->add_option("--max-iter", poisson.max_iter, "Iteration budget")->check(CLI::PositiveNumber);
    b_opt->excludes(sw_opt);

    FourierArgs fourier;
    auto* sf = app.add_subcommand("fourier", "Fourier-symbol stability test");
    sf->add_option("--coeff", fourier.coeffs, "Term l,m,value (repeatable)")->required()->allow_extra_args(false);
    sf->add_option("--eta", fourier.etas, "Frequency range per dimension (repeatable)")->required()->allow_extra_args(false);
    sf->add_option("--eps-hat", fourier.eps_hat, "Perturbation amplitude");
    sf->add_option("--dim", fourier.dim, "Spatial dimension (default: largest l)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : Usage;
    }

    try {
        if (sb->parsed()) {
            cmd_border(border, dir);
        } else if (ss->parsed()) {
            cmd_scan(scan, dir);
        } else if (sa->parsed()) {
            cmd_amplitudes(amp, dir);
        } else if (sp->parsed()) {
            cmd_poisson(poisson, dir, *sp);
        } else if (sf->parsed()) {
            cmd_fourier(fourier, dir);
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return NumericFailure;
    }
    return Ok;
}

}  // namespace dpistab::cli
