#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "dpistab/kernels.hpp"

namespace dpistab {

struct IterationLimits {
    std::uint64_t max_iter = 100000;
    double tolerance = 1e-12;  // on |U_{n+1} - U_n| / max(1, |U_n|)
    double blowup = 1e10;
};

enum class IterationStatus { Converged, Diverged, MaxIterations, Singular };

std::string_view status_token(IterationStatus s);

/// Classified end of a scalar DPI trajectory.
///
/// `final_value` is U/u0 at termination (meaningful when Converged).
/// Singular marks an implicit step whose pivot vanished, kept apart from blow-up.
struct IterationOutcome {
    IterationStatus status = IterationStatus::MaxIterations;
    double final_value = 0.0;
    std::uint64_t iterations_used = 0;

    bool converged() const { return status == IterationStatus::Converged; }
};

/// U_{n+1} = U_0 + r (1 + eps U_n^Z) U_n from U_0 = u0.
IterationOutcome iterate_explicit(double r, double epsilon, double u0, unsigned Z, const IterationLimits& limits = {});

/// (1 - r(1 + 2 eps U_n)) U_{n+1} = u0 - r eps U_n^2 from U_0 = u0.
IterationOutcome iterate_implicit(double r, double epsilon, double u0, const IterationLimits& limits = {});

enum class Scheme { Explicit, Implicit };

std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view name);

/// Analytic verdict at one point. Explicit: r <= explicit_border_r(eps_hat, Z)
/// (|r| < 1 and |theta| <= theta_max off the positive quadrant). Implicit: |theta| <= 1/4 and r != 1.
bool analytic_stable(Scheme scheme, double r, double eps_hat, unsigned Z);

/// Paired analytic and empirical verdicts over an (eps_hat, r) grid, row-major in (eps_hat, r).
struct RegionGrid {
    std::vector<double> r_axis;
    std::vector<double> eps_hat_axis;
    unsigned Z = 1;
    Scheme scheme = Scheme::Explicit;
    double u0 = 1.0;
    std::vector<std::uint8_t> analytic;  // 1 = stable
    std::vector<IterationOutcome> empirical;

    std::size_t index(std::size_t e, std::size_t r) const { return e * r_axis.size() + r; }

    struct Tally {
        std::size_t cells = 0;
        std::size_t analytic_stable = 0;
        std::size_t converged = 0;
        std::size_t diverged = 0;
        std::size_t max_iterations = 0;
        std::size_t singular = 0;
        std::size_t disagreements = 0;  // analytic stable != empirical converged
    };
    Tally tally() const;
};

struct ScanOptions {
    double u0 = 1.0;
    IterationLimits limits{};
    kernels::Isa isa = kernels::active_isa();
};

RegionGrid scan_region(std::vector<double> r_axis, std::vector<double> eps_hat_axis, unsigned Z, Scheme scheme,
                       const ScanOptions& options = {});

/// CSV `eps_hat,r,analytic,empirical,iterations`, one row per cell.
void write_region_csv(std::ostream& os, const RegionGrid& grid);

/// Stability edge in r at fixed eps_hat by bisecting iterate_explicit on [0, 1].
double empirical_explicit_border(double eps_hat, unsigned Z, double resolution = 1e-3,
                                 const IterationLimits& limits = {});

}  // namespace dpistab
