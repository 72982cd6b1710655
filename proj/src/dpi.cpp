#include "dpistab/dpi.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "dpistab/errors.hpp"
#include "dpistab/format.hpp"
#include "dpistab/series.hpp"

namespace dpistab {

std::string_view status_token(IterationStatus s) {
    switch (s) {
        case IterationStatus::Converged:
            return "converged";
        case IterationStatus::Diverged:
            return "diverged";
        case IterationStatus::MaxIterations:
            return "maxiter";
        case IterationStatus::Singular:
            return "singular";
    }
    return "unknown";
}

std::string_view scheme_name(Scheme s) { return s == Scheme::Explicit ? "explicit" : "implicit"; }

Scheme parse_scheme(std::string_view name) {
    if (name == "explicit") {
        return Scheme::Explicit;
    }
    if (name == "implicit") {
        return Scheme::Implicit;
    }
    throw DomainError("unknown scheme '" + std::string(name) + "' (expected explicit or implicit)");
}

namespace {

kernels::LaneLimits lane_limits(const IterationLimits& limits) {
    if (limits.max_iter < 1) {
        throw DomainError("max_iter must be >= 1");
    }
    return {limits.max_iter, limits.tolerance, limits.blowup, 1e-14};
}

IterationOutcome to_outcome(const kernels::LaneResult& lane, double u0) {
    IterationOutcome out;
    switch (lane.status) {
        case kernels::LaneStatus::Converged:
            out.status = IterationStatus::Converged;
            break;
        case kernels::LaneStatus::Diverged:
            out.status = IterationStatus::Diverged;
            break;
        case kernels::LaneStatus::MaxIterations:
            out.status = IterationStatus::MaxIterations;
            break;
        case kernels::LaneStatus::Singular:
            out.status = IterationStatus::Singular;
            break;
    }
    out.final_value = lane.value / u0;
    out.iterations_used = lane.iterations;
    return out;
}

void check_inputs(double r, double epsilon, double u0) {
    if (!std::isfinite(r) || !std::isfinite(epsilon) || !std::isfinite(u0)) {
        throw DomainError("DPI iteration requires finite r, epsilon and u0");
    }
    if (u0 == 0.0) {
        throw DomainError("u0 must be nonzero (outcomes are reported as U/u0)");
    }
}

}  // namespace

IterationOutcome iterate_explicit(double r, double epsilon, double u0, unsigned Z, const IterationLimits& limits) {
    check_inputs(r, epsilon, u0);
    if (Z == 0) {
        throw DomainError("nonlinearity degree Z must be >= 1");
    }
    kernels::LaneResult lane;
    kernels::explicit_batch(kernels::Isa::Scalar, {&r, 1}, {&epsilon, 1}, {&u0, 1}, Z, lane_limits(limits),
                            {&lane, 1});
    return to_outcome(lane, u0);
}

IterationOutcome iterate_implicit(double r, double epsilon, double u0, const IterationLimits& limits) {
    check_inputs(r, epsilon, u0);
    kernels::LaneResult lane;
    kernels::implicit_batch(kernels::Isa::Scalar, {&r, 1}, {&epsilon, 1}, {&u0, 1}, lane_limits(limits),
                            {&lane, 1});
    return to_outcome(lane, u0);
}

bool analytic_stable(Scheme scheme, double r, double eps_hat, unsigned Z) {
    if (scheme == Scheme::Implicit) {
        if (Z != 1) {
            throw DomainError("implicit DPI analysis is available for Z = 1 only");
        }
        if (r == 1.0) {
            return false;
        }
        return theta_within_radius(theta({r, eps_hat, 1}), 1);
    }
    if (eps_hat >= 0.0 && r >= 0.0) {
        return r <= explicit_border_r(eps_hat, Z).r_max;
    }
    if (!(std::fabs(r) < 1.0)) {
        return false;
    }
    return theta_within_radius(theta({r, eps_hat, Z}), Z);
}

RegionGrid::Tally RegionGrid::tally() const {
    Tally t;
    t.cells = empirical.size();
    for (std::size_t k = 0; k < empirical.size(); ++k) {
        const bool a = analytic[k] != 0;
        t.analytic_stable += a ? 1 : 0;
        switch (empirical[k].status) {
            case IterationStatus::Converged:
                ++t.converged;
                break;
            case IterationStatus::Diverged:
                ++t.diverged;
                break;
            case IterationStatus::MaxIterations:
                ++t.max_iterations;
                break;
            case IterationStatus::Singular:
                ++t.singular;
                break;
        }
        if (a != empirical[k].converged()) {
            ++t.disagreements;
        }
    }
    return t;
}

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) {
        throw DomainError(std::string(name) + " axis is empty");
    }
    for (double v : axis) {
        if (!std::isfinite(v)) {
            throw DomainError(std::string(name) + " axis has a non-finite value");
        }
    }
    if (!std::is_sorted(axis.begin(), axis.end())) {
        throw DomainError(std::string(name) + " axis is not sorted");
    }
}

}  // namespace

RegionGrid scan_region(std::vector<double> r_axis, std::vector<double> eps_hat_axis, unsigned Z, Scheme scheme,
                       const ScanOptions& options) {
    check_axis(r_axis, "r");
    check_axis(eps_hat_axis, "eps_hat");
    if (Z == 0) {
        throw DomainError("nonlinearity degree Z must be >= 1");
    }
    if (scheme == Scheme::Implicit && Z != 1) {
        throw DomainError("implicit DPI analysis is available for Z = 1 only");
    }
    if (!std::isfinite(options.u0) || options.u0 == 0.0) {
        throw DomainError("u0 must be finite and nonzero");
    }

    RegionGrid g;
    g.r_axis = std::move(r_axis);
    g.eps_hat_axis = std::move(eps_hat_axis);
    g.Z = Z;
    g.scheme = scheme;
    g.u0 = options.u0;

    const std::size_t cells = g.r_axis.size() * g.eps_hat_axis.size();
    const double u0_power = std::pow(options.u0, static_cast<double>(Z));
    std::vector<double> rs(cells);
    std::vector<double> eps(cells);
    std::vector<double> base(cells, options.u0);
    g.analytic.resize(cells);
    for (std::size_t e = 0; e < g.eps_hat_axis.size(); ++e) {
        const double eh = g.eps_hat_axis[e];
        for (std::size_t k = 0; k < g.r_axis.size(); ++k) {
            const std::size_t idx = g.index(e, k);
            rs[idx] = g.r_axis[k];
            eps[idx] = eh / u0_power;
            g.analytic[idx] = analytic_stable(scheme, g.r_axis[k], eh, Z) ? 1 : 0;
        }
    }

    std::vector<kernels::LaneResult> lanes(cells);
    const auto ll = lane_limits(options.limits);
    if (scheme == Scheme::Explicit) {
        kernels::explicit_batch(options.isa, rs, eps, base, Z, ll, lanes);
    } else {
        kernels::implicit_batch(options.isa, rs, eps, base, ll, lanes);
    }
    g.empirical.reserve(cells);
    for (const auto& lane : lanes) {
        g.empirical.push_back(to_outcome(lane, options.u0));
    }
    return g;
}

void write_region_csv(std::ostream& os, const RegionGrid& grid) {
    os << "eps_hat,r,analytic,empirical,iterations\n";
    for (std::size_t e = 0; e < grid.eps_hat_axis.size(); ++e) {
        for (std::size_t k = 0; k < grid.r_axis.size(); ++k) {
            const std::size_t idx = grid.index(e, k);
            os << format_double(grid.eps_hat_axis[e]) << ',' << format_double(grid.r_axis[k]) << ','
               << (grid.analytic[idx] ? "stable" : "unstable") << ',' << status_token(grid.empirical[idx].status)
               << ',' << grid.empirical[idx].iterations_used << '\n';
        }
    }
}

double empirical_explicit_border(double eps_hat, unsigned Z, double resolution, const IterationLimits& limits) {
    if (!(eps_hat >= 0.0) || !(resolution > 0.0)) {
        throw DomainError("empirical border needs eps_hat >= 0 and a positive resolution");
    }
    auto stable = [&](double r) {
        IterationOutcome out = iterate_explicit(r, eps_hat, 1.0, Z, limits);
        if (out.status == IterationStatus::MaxIterations) {
            IterationLimits longer = limits;
            longer.max_iter *= 10;
            out = iterate_explicit(r, eps_hat, 1.0, Z, longer);
        }
        return out.converged();
    };
    double lo = 0.0;
    double hi = 1.0;
    if (!stable(lo) || stable(hi)) {
        throw ScanRangeError("r in [0, 1] does not bracket the explicit stability edge");
    }
    while (hi - lo > resolution) {
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
