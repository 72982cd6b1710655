#include "dpistab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "dpistab/errors.hpp"
#include "dpistab/format.hpp"
#include "dpistab/series.hpp"

namespace dpistab {

FourierSymbol::FourierSymbol(unsigned d, std::vector<SymbolTerm> terms) : d_(d), terms_(std::move(terms)) {
    if (d_ == 0) {
        throw DomainError("symbol dimension must be >= 1");
    }
    if (terms_.empty()) {
        throw DomainError("symbol needs at least one term");
    }
    for (const auto& t : terms_) {
        if (t.l < 1 || t.l > d_) {
            throw DomainError("term dimension index " + std::to_string(t.l) + " outside 1.." + std::to_string(d_));
        }
        if (t.m < 1) {
            throw DomainError("derivative order must be >= 1");
        }
        if (!std::isfinite(t.a)) {
            throw DomainError("symbol coefficient must be finite");
        }
    }
}

std::complex<double> fourier_eigenvalue(const FourierSymbol& sym, std::span<const double> eta) {
    if (eta.size() != sym.dimension()) {
        throw DomainError("frequency vector has dimension " + std::to_string(eta.size()) + ", symbol has " +
                          std::to_string(sym.dimension()));
    }
    std::complex<double> sum{0.0, 0.0};
    for (const auto& t : sym.terms()) {
        const double e = eta[t.l - 1];
        // i^m cycles through 1, i, -1, -i
        const double mag = std::pow(e, static_cast<double>(t.m));
        switch (t.m % 4) {
            case 0:
                sum += std::complex<double>(t.a * mag, 0.0);
                break;
            case 1:
                sum += std::complex<double>(0.0, t.a * mag);
                break;
            case 2:
                sum += std::complex<double>(-t.a * mag, 0.0);
                break;
            default:
                sum += std::complex<double>(0.0, -t.a * mag);
                break;
        }
    }
    return sum;
}

std::string_view verdict_token(Verdict v) {
    switch (v) {
        case Verdict::Stable:
            return "stable";
        case Verdict::Unstable:
            return "unstable";
        case Verdict::Undecided:
            return "undecided";
    }
    return "undecided";
}

namespace {

struct ThetaVerdict {
    double theta;
    Verdict verdict;
};

ThetaVerdict classify(double r, double eps_hat) {
    if (r == 1.0) {
        return {std::numeric_limits<double>::infinity(), Verdict::Undecided};
    }
    const double th = theta({r, eps_hat, 1});
    return {th, theta_within_radius(th, 1) ? Verdict::Stable : Verdict::Unstable};
}

}  // namespace

FourierStability fourier_stability(const FourierSymbol& sym, const std::vector<std::vector<double>>& eta_grid,
                                   double eps_hat, bool record_samples) {
    if (eta_grid.empty()) {
        throw DomainError("frequency grid is empty");
    }
    if (!std::isfinite(eps_hat)) {
        throw DomainError("eps_hat must be finite");
    }
    FourierStability out;
    for (const auto& eta : eta_grid) {
        const double mag = std::abs(fourier_eigenvalue(sym, eta));
        out.r = std::max(out.r, mag);
        if (record_samples) {
            const auto tv = classify(mag, eps_hat);
            out.samples.push_back({eta, tv.theta, tv.verdict});
        }
    }
    const auto tv = classify(out.r, eps_hat);
    out.theta = tv.theta;
    out.verdict = tv.verdict;
    out.singular = out.r == 1.0;
    return out;
}

void write_fourier_csv(std::ostream& os, const FourierStability& result, unsigned d) {
    for (unsigned l = 1; l <= d; ++l) {
        os << "eta" << l << ',';
    }
    os << "theta,verdict\n";
    for (const auto& s : result.samples) {
        for (double e : s.eta) {
            os << format_double(e) << ',';
        }
        os << format_double(s.theta) << ',' << verdict_token(s.verdict) << '\n';
    }
}

std::vector<double> tridiagonal_eigenvalues(std::size_t M) {
    if (M < 1) {
        throw DomainError("M must be >= 1");
    }
    std::vector<double> ev(M);
    for (std::size_t k = 1; k <= M; ++k) {
        ev[k - 1] = 2.0 * (std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(M + 1)) - 1.0);
    }
    return ev;
}

namespace {

void check_grid(std::size_t M) {
    if (M < 2) {
        throw DomainError("Poisson grid needs M >= 2 interior points");
    }
}

double initial_profile(double gamma) { return 4.0 * gamma * (1.0 - gamma); }

double radius_factor(double gamma) {
    return 2.0 * (1.0 - std::cos(gamma * std::numbers::pi)) * (1.0 + 8.0 * gamma * (1.0 - gamma));
}

double residual_factor(double gamma) {
    const double u = initial_profile(gamma);
    return 2.0 * (1.0 - std::cos(gamma * std::numbers::pi)) * (u + u * u);
}

template <class F>
double continuous_max(F f) {
    constexpr std::size_t samples = 200000;
    double best = 0.0;
    for (std::size_t j = 0; j <= samples; ++j) {
        best = std::max(best, f(static_cast<double>(j) / samples));
    }
    return best;
}

// Number of eigenvalues below x of the symmetric tridiagonal (diag, off).
std::size_t sturm_count(const std::vector<double>& diag, const std::vector<double>& off, double x) {
    std::size_t count = 0;
    double q = diag[0] - x;
    if (q < 0.0) {
        ++count;
    }
    for (std::size_t k = 1; k < diag.size(); ++k) {
        if (q == 0.0) {
            q = 1e-300;
        }
        q = diag[k] - x - off[k - 1] * off[k - 1] / q;
        if (q < 0.0) {
            ++count;
        }
    }
    return count;
}

}  // namespace

double product_spectral_radius(std::size_t M) {
    check_grid(M);
    const double h = 1.0 / static_cast<double>(M + 1);
    std::vector<double> d(M);
    for (std::size_t k = 0; k < M; ++k) {
        d[k] = 1.0 + 2.0 * initial_profile(static_cast<double>(k + 1) * h);
    }
    // T D is similar to D^(1/2) T D^(1/2); all eigenvalues are negative.
    std::vector<double> diag(M);
    std::vector<double> off(M - 1);
    double lo = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
        diag[k] = -2.0 * d[k];
        if (k + 1 < M) {
            off[k] = std::sqrt(d[k] * d[k + 1]);
        }
    }
    for (std::size_t k = 0; k < M; ++k) {
        double radius = 0.0;
        if (k > 0) {
            radius += off[k - 1];
        }
        if (k + 1 < M) {
            radius += off[k];
        }
        lo = std::min(lo, diag[k] - radius);
    }
    double hi = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::fabs(lo); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(diag, off, mid) >= 1) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return -0.5 * (lo + hi);
}

PoissonSpectrum poisson_spectrum(std::size_t M, double beta) {
    check_grid(M);
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("beta must be positive and finite");
    }
    PoissonSpectrum s;
    s.M = M;
    s.beta = beta;
    double r_unit = 0.0;
    double v_unit = 0.0;
    const double n1 = static_cast<double>(M + 1);
    for (std::size_t k = 1; k <= M; ++k) {
        const double g = static_cast<double>(k) / n1;
        r_unit = std::max(r_unit, radius_factor(g));
        v_unit = std::max(v_unit, residual_factor(g));
    }
    s.r = beta * r_unit;
    s.V0 = beta * v_unit;
    s.epsilon = 2.0 * beta * (1.0 - std::cos(static_cast<double>(M) * std::numbers::pi / n1)) / s.r;
    s.eps_hat = s.epsilon * s.V0;
    s.r_continuous = beta * continuous_max(radius_factor);
    s.V0_continuous = beta * continuous_max(residual_factor);
    s.true_radius = beta * product_spectral_radius(M);
    return s;
}

double analytic_cfl_bound(std::size_t M) {
    check_grid(M);
    const PoissonSpectrum unit = poisson_spectrum(M, 1.0);
    // r = rho beta and eps_hat = eta beta, so theta(beta) = rho eta beta^2 / (1 - rho beta)^2.
    const double rho = unit.r;
    const double eta = unit.eps_hat;
    auto th = [&](double b) {
        const double lin = 1.0 - rho * b;
        return rho * eta * b * b / (lin * lin);
    };
    double lo = 0.0;
    double hi = 1.0 / rho;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (th(mid) <= 0.25) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

PoissonRun poisson_run_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("invalid Poisson config: ") + e.what());
    }
    if (!j.is_object() || !j.contains("M") || !j.contains("beta")) {
        throw DomainError("Poisson config needs keys M and beta");
    }
    PoissonRun run;
    try {
        const auto m = j.at("M").get<std::int64_t>();
        if (m < 2) {
            throw DomainError("Poisson config: M must be >= 2");
        }
        run.M = static_cast<std::size_t>(m);
        run.beta = j.at("beta").get<double>();
        if (j.contains("max_iter")) {
            const auto it = j.at("max_iter").get<std::int64_t>();
            if (it < 1) {
                throw DomainError("Poisson config: max_iter must be >= 1");
            }
            run.max_iter = static_cast<std::uint64_t>(it);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("invalid Poisson config: ") + e.what());
    }
    return run;
}

PoissonResult simulate_poisson(const PoissonRun& run) {
    check_grid(run.M);
    if (!(run.beta > 0.0) || !std::isfinite(run.beta)) {
        throw DomainError("beta must be positive and finite");
    }
    if (run.max_iter < 1) {
        throw DomainError("max_iter must be >= 1");
    }
    const std::size_t M = run.M;
    const double h = 1.0 / static_cast<double>(M + 1);
    std::vector<double> u0(M);
    for (std::size_t k = 0; k < M; ++k) {
        u0[k] = initial_profile(static_cast<double>(k + 1) * h);
    }
    std::vector<double> u = u0;
    std::vector<double> next(M);
    std::vector<double> padded(M + 2);

    PoissonResult res;
    auto max_norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) {
            m = std::max(m, std::fabs(x));
        }
        return m;
    };
    double norm = max_norm(u);
    if (run.record_history) {
        res.norm_history.push_back(norm);
    }
    res.outcome.status = IterationStatus::MaxIterations;
    std::uint64_t n = 0;
    while (n < run.max_iter) {
        const auto stats = kernels::poisson_step(run.isa, u0, u, padded, next, run.beta, run.residual);
        ++n;
        double delta = stats.max_abs_delta;
        double out_norm = stats.max_abs_out;
        if (n == 1 && run.seed_amplitude != 0.0) {
            delta = 0.0;
            out_norm = 0.0;
            for (std::size_t k = 0; k < M; ++k) {
                next[k] += (k % 2 == 0 ? -run.seed_amplitude : run.seed_amplitude);
                delta = std::max(delta, std::fabs(next[k] - u[k]));
                out_norm = std::max(out_norm, std::fabs(next[k]));
            }
        }
        if (run.record_history) {
            res.norm_history.push_back(out_norm);
        }
        if (!stats.finite || !(out_norm <= run.blowup)) {
            res.outcome.status = IterationStatus::Diverged;
            u.swap(next);
            norm = out_norm;
            break;
        }
        const bool done = delta < run.tolerance * std::max(1.0, norm);
        u.swap(next);
        norm = out_norm;
        if (done) {
            res.outcome.status = IterationStatus::Converged;
            break;
        }
    }
    res.outcome.iterations_used = n;
    res.outcome.final_value = norm;
    res.solution = std::move(u);
    return res;
}

void write_norm_history_csv(std::ostream& os, const PoissonResult& result) {
    os << "step,max_norm\n";
    for (std::size_t n = 0; n < result.norm_history.size(); ++n) {
        os << n << ',' << format_double(result.norm_history[n]) << '\n';
    }
}

double experimental_cfl_bound(std::size_t M, const CflSearch& search) {
    check_grid(M);
    if (!(search.lower > 0.0) || !(search.upper > search.lower) || !(search.resolution > 0.0)) {
        throw DomainError("CFL search needs 0 < lower < upper and a positive resolution");
    }
    auto stable = [&](double beta) {
        PoissonRun run;
        run.M = M;
        run.beta = beta;
        run.max_iter = search.max_iter;
        run.residual = search.residual;
        auto out = simulate_poisson(run).outcome;
        if (out.status == IterationStatus::MaxIterations) {
            run.max_iter = search.max_iter * 10;
            out = simulate_poisson(run).outcome;
        }
        return out.status != IterationStatus::Diverged;
    };
    double lo = search.lower;
    double hi = search.upper;
    if (!stable(lo) || stable(hi)) {
        throw ScanRangeError("beta range [" + format_double(lo) + ", " + format_double(hi) +
                             "] does not bracket the stability edge");
    }
    while (hi - lo > search.resolution) {
        const double mid = 0.5 * (lo + hi);
        if (stable(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace dpistab
