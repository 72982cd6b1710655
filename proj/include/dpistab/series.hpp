#pragma once

#include <cstddef>
#include <utility>

#include "dpistab/combinatorics.hpp"

namespace dpistab {

/// A location in stability-parameter space.
///
/// `r` is the linear stability number dt * lambda * dR/du|_{u0}; `eps_hat` is the
/// combined perturbation amplitude eps * u0^Z; `Z` is the degree of the
/// polynomial nonlinearity in R = c (1 + eps u^Z) u.
struct StabilityPoint {
    double r = 0.0;
    double eps_hat = 0.0;
    unsigned Z = 1;
};

/// Largest stable r on the explicit border, and theta evaluated there.
struct BorderVerdict {
    double r_max = 1.0;
    double theta_at_border = 0.25;
};

/// Roots of r eps_hat / (1 - r)^2 = 1/4. Implicit DPI is unstable strictly between them.
struct GapBounds {
    double r_low = 1.0;
    double r_high = 1.0;
};

/// Nonlinear stability number r eps_hat / (1 - r)^(Z+1). Throws SingularityError at r == 1.
double theta(const StabilityPoint& p);

/// Convergence radius Z^Z / (Z+1)^(Z+1) of sum C(i,Z) theta^i.
double theta_max(unsigned Z);
BigRational theta_max_exact(unsigned Z);

/// |theta| <= theta_max(Z), inclusive at the border.
bool theta_within_radius(double theta_value, unsigned Z);

/// Closed-form nonlinear shift for Z = 1: 4 theta / ((1-r)(1+sqrt(1-4 theta))^2).
double nonlinear_shift(const StabilityPoint& p);

/// Converged U/u0 for Z = 1: (1 + 4 theta/(1+sqrt(1-4 theta))^2) / (1-r).
double converged_solution(const StabilityPoint& p);

/// Explicit DPI border at fixed eps_hat. Z = 1 uses the closed-form parabola;
/// Z >= 2 bisects the canonical polynomial rt^(Z+1) + b rt = b on rt = 1 - r in [0, 1].
BorderVerdict explicit_border_r(double eps_hat, unsigned Z);

GapBounds implicit_gap(double eps_hat);

/// Exactly `terms` terms of sum_{i>=1} C(i,Z) theta^i with exact coefficients.
double shift_partial_sum(double theta_value, unsigned Z, std::size_t terms);

struct SeriesSum {
    double value = 0.0;
    std::size_t terms = 0;
    bool converged = false;  // false when the term cap was hit
};

struct SeriesLimits {
    double relative_cutoff = 1e-15;
    std::size_t max_terms = 10000;
};

/// sum_{i>=1} C(i,Z) theta^i truncated once a term drops below cutoff * |sum|.
SeriesSum shift_series(double theta_value, unsigned Z, SeriesLimits limits = {});

/// (1 + sum C(i,Z) theta^i) / (1 - r) from the truncated series, for any Z.
double series_solution(const StabilityPoint& p, SeriesLimits limits = {});

/// C(i+1,Z)/C(i,Z) * theta_max(Z); tends to 1 as i grows.
double normalized_ratio(std::size_t i, unsigned Z);

}  // namespace dpistab
