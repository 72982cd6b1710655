#include "dpistab/series.hpp"

#include <array>
#include <cmath>
#include <string>

#include "dpistab/errors.hpp"

namespace dpistab {

namespace {

void require_degree(unsigned Z) {
    if (Z == 0) {
        throw DomainError("nonlinearity degree Z must be >= 1");
    }
}

void require_quadratic(const StabilityPoint& p) {
    if (p.Z != 1) {
        throw DomainError("closed form exists only for Z = 1");
    }
}

void require_nonnegative(double eps_hat) {
    if (!(eps_hat >= 0.0) || !std::isfinite(eps_hat)) {
        throw DomainError("eps_hat must be finite and >= 0");
    }
}

// C * theta^i without overflowing the coefficient.
double scaled_term(const BigCount& c, double theta_value, std::size_t i) {
    if (theta_value == 0.0) {
        return 0.0;
    }
    const double direct = c.to_double();
    if (std::isfinite(direct)) {
        return direct * std::pow(theta_value, static_cast<double>(i));
    }
    const auto s = c.to_scaled();
    const double log2_mag = static_cast<double>(s.exponent) +
                            static_cast<double>(i) * std::log2(std::fabs(theta_value));
    const double sign = (theta_value < 0.0 && i % 2 == 1) ? -1.0 : 1.0;
    return sign * s.mantissa * std::exp2(log2_mag);
}

}  // namespace

double theta(const StabilityPoint& p) {
    require_degree(p.Z);
    if (!std::isfinite(p.r) || !std::isfinite(p.eps_hat)) {
        throw DomainError("theta requires finite r and eps_hat");
    }
    if (p.r == 1.0) {
        throw SingularityError("theta has a pole at r = 1");
    }
    return p.r * p.eps_hat / std::pow(1.0 - p.r, static_cast<double>(p.Z + 1));
}

double theta_max(unsigned Z) {
    constexpr unsigned cached = 64;
    static const auto table = [] {
        std::array<double, cached + 1> t{};
        for (unsigned z = 1; z <= cached; ++z) {
            t[z] = theta_max_exact(z).convert_to<double>();
        }
        return t;
    }();
    require_degree(Z);
    return Z <= cached ? table[Z] : theta_max_exact(Z).convert_to<double>();
}

BigRational theta_max_exact(unsigned Z) {
    require_degree(Z);
    BigInt num = boost::multiprecision::pow(BigInt(Z), Z);
    BigInt den = boost::multiprecision::pow(BigInt(Z + 1), Z + 1);
    return BigRational(num, den);
}

bool theta_within_radius(double theta_value, unsigned Z) {
    return std::fabs(theta_value) <= theta_max(Z);
}

double nonlinear_shift(const StabilityPoint& p) {
    require_quadratic(p);
    const double t = theta(p);
    if (!theta_within_radius(t, 1)) {
        throw DivergenceError("nonlinear shift diverges for |theta| > 1/4 (theta = " + std::to_string(t) + ")");
    }
    const double s = 1.0 + std::sqrt(1.0 - 4.0 * t);
    return 4.0 * t / ((1.0 - p.r) * s * s);
}

double converged_solution(const StabilityPoint& p) {
    require_quadratic(p);
    const double t = theta(p);
    if (!theta_within_radius(t, 1)) {
        throw DivergenceError("no converged solution for |theta| > 1/4 (theta = " + std::to_string(t) + ")");
    }
    const double s = 1.0 + std::sqrt(1.0 - 4.0 * t);
    return (1.0 + 4.0 * t / (s * s)) / (1.0 - p.r);
}

BorderVerdict explicit_border_r(double eps_hat, unsigned Z) {
    require_degree(Z);
    require_nonnegative(eps_hat);
    const double tm = theta_max(Z);
    if (eps_hat == 0.0) {
        // theta is 0/0 at (r = 1, eps_hat = 0); report its limit along the border.
        return {1.0, tm};
    }
    double r = 0.0;
    if (Z == 1) {
        // 1 + 2e - 2 sqrt(e + e^2), written through its conjugate root.
        r = 1.0 / (1.0 + 2.0 * eps_hat + 2.0 * std::sqrt(eps_hat + eps_hat * eps_hat));
    } else {
        const double z = Z;
        const double b = std::exp((z + 1.0) * std::log(z + 1.0) - z * std::log(z)) * eps_hat;
        double lo = 0.0;  // f(0) = -b < 0
        double hi = 1.0;  // f(1) = 1 > 0
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double f = std::pow(mid, z + 1.0) + b * mid - b;
            if (f > 0.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        r = 1.0 - 0.5 * (lo + hi);
    }
    return {r, theta({r, eps_hat, Z})};
}

GapBounds implicit_gap(double eps_hat) {
    require_nonnegative(eps_hat);
    const double high = 1.0 + 2.0 * eps_hat + 2.0 * std::sqrt(eps_hat + eps_hat * eps_hat);
    return {1.0 / high, high};
}

double shift_partial_sum(double theta_value, unsigned Z, std::size_t terms) {
    require_degree(Z);
    FussCatalanSequence seq(Z);
    double sum = 0.0;
    for (std::size_t i = 1; i <= terms; ++i) {
        seq.advance();
        sum += scaled_term(seq.current(), theta_value, i);
    }
    return sum;
}

SeriesSum shift_series(double theta_value, unsigned Z, SeriesLimits limits) {
    require_degree(Z);
    SeriesSum out;
    if (theta_value == 0.0) {
        out.converged = true;
        return out;
    }
    FussCatalanSequence seq(Z);
    for (std::size_t i = 1; i <= limits.max_terms; ++i) {
        seq.advance();
        const double term = scaled_term(seq.current(), theta_value, i);
        out.value += term;
        out.terms = i;
        if (!std::isfinite(out.value)) {
            return out;
        }
        // Stop on the size of the next term.
        const double next_ratio = normalized_ratio(i, Z) * theta_value / theta_max(Z);
        if (std::fabs(term * next_ratio) < limits.relative_cutoff * std::fabs(out.value)) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

double series_solution(const StabilityPoint& p, SeriesLimits limits) {
    const double t = theta(p);
    const SeriesSum s = shift_series(t, p.Z, limits);
    if (!s.converged) {
        throw DivergenceError("series solution did not converge within " + std::to_string(limits.max_terms) +
                              " terms (theta = " + std::to_string(t) + ")");
    }
    return (1.0 + s.value) / (1.0 - p.r);
}

double normalized_ratio(std::size_t i, unsigned Z) {
    require_degree(Z);
    // Ratio of consecutive coefficients as a product of small factors.
    const double z = Z;
    const double n = static_cast<double>(i);
    double ratio = 1.0 / (n + 1.0);
    for (unsigned j = 1; j <= Z + 1; ++j) {
        ratio *= ((z + 1.0) * n + j);
    }
    for (unsigned j = 2; j <= Z + 1; ++j) {
        ratio /= (z * n + j);
    }
    return ratio * theta_max(Z);
}

}  // namespace dpistab
