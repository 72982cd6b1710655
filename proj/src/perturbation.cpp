#include "dpistab/perturbation.hpp"

#include <cmath>

#include "dpistab/combinatorics.hpp"
#include "dpistab/errors.hpp"

namespace dpistab {

AmplitudeTable::AmplitudeTable(std::size_t order, std::size_t iterations, double r, double u0, unsigned Z)
    : order_(order), iterations_(iterations), r_(r), u0_(u0), Z_(Z),
      data_((order + 1) * (iterations + 1), 0.0) {
    data_[0] = u0;
}

double AmplitudeTable::normalized(std::size_t i, std::size_t n) const {
    return at(i, n) / std::pow(u0_, static_cast<double>(Z_ * i + 1));
}

bool AmplitudeTable::overflowed(std::size_t i, std::size_t n) const { return !std::isfinite(at(i, n)); }

namespace {

void require_finite(double r, double u0) {
    if (!std::isfinite(r) || !std::isfinite(u0)) {
        throw DomainError("cascade requires finite r and u0");
    }
}

// out[k] = sum_{j<=k} a[j] b[k-j] for k < out.size()
void truncated_product(const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& out) {
    for (std::size_t k = 0; k < out.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            s += a[j] * b[k - j];
        }
        out[k] = s;
    }
}

}  // namespace

AmplitudeTable explicit_cascade(double r, double u0, unsigned Z, std::size_t order, std::size_t iterations) {
    require_finite(r, u0);
    if (Z == 0) {
        throw DomainError("nonlinearity degree Z must be >= 1");
    }
    if (iterations == 0) {
        throw DomainError("cascade needs at least one iteration");
    }
    AmplitudeTable t(order, iterations, r, u0, Z);
    // The eps^i source needs U_n^(Z+1) up to eps^(i-1).
    const std::size_t width = order;  // degrees 0 .. order-1
    std::vector<double> current(order + 1);
    std::vector<double> power(width);
    std::vector<double> scratch(width);
    for (std::size_t n = 0; n < iterations; ++n) {
        for (std::size_t i = 0; i <= order; ++i) {
            current[i] = t.at(i, n);
        }
        if (width > 0) {
            std::vector<double> base(current.begin(), current.begin() + static_cast<std::ptrdiff_t>(width));
            truncated_product(base, base, power);
            for (unsigned k = 1; k < Z; ++k) {
                truncated_product(power, base, scratch);
                power.swap(scratch);
            }
        }
        t.at(0, n + 1) = u0 + r * current[0];
        for (std::size_t i = 1; i <= order; ++i) {
            t.at(i, n + 1) = r * current[i] + r * power[i - 1];
        }
    }
    return t;
}

namespace {

// Order-i coefficient of (1 - r - 2 r eps U_n) U_{n+1} = u0 - r eps U_n^2, solved for u_{i,n+1}:
// (1-r) u_{i,n+1} = 2r sum_{j+k=i-1} u_{j,n} u_{k,n+1} - r sum_{j+k=i-1} u_{j,n} u_{k,n}
double implicit_order(std::size_t i, double r, double u0, const std::vector<double>& prev,
                      const std::vector<double>& next) {
    if (i == 0) {
        return u0 / (1.0 - r);
    }
    double cross = 0.0;
    double square = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
        cross += prev[j] * next[i - 1 - j];
        square += prev[j] * prev[i - 1 - j];
    }
    return (2.0 * r * cross - r * square) / (1.0 - r);
}

void check_implicit(double r, double u0) {
    require_finite(r, u0);
    if (r == 1.0) {
        throw SingularityError("implicit cascade is singular at r = 1");
    }
}

}  // namespace

AmplitudeTable implicit_cascade(double r, double u0, std::size_t order, std::size_t iterations) {
    check_implicit(r, u0);
    if (iterations == 0) {
        throw DomainError("cascade needs at least one iteration");
    }
    AmplitudeTable t(order, iterations, r, u0, 1);
    for (std::size_t n = 1; n <= iterations; ++n) {
        std::vector<double> fixed(order + 1, 0.0);
        for (std::size_t i = 0; i <= order; ++i) {
            // Lower orders are already n-independent: u_{j,n} = u_{j,n+1}.
            fixed[i] = implicit_order(i, r, u0, fixed, fixed);
        }
        for (std::size_t i = 0; i <= order; ++i) {
            t.at(i, n) = fixed[i];
        }
    }
    return t;
}

AmplitudeTable implicit_cascade_from_initial_condition(double r, double u0, std::size_t order,
                                                       std::size_t iterations) {
    check_implicit(r, u0);
    if (iterations == 0) {
        throw DomainError("cascade needs at least one iteration");
    }
    AmplitudeTable t(order, iterations, r, u0, 1);
    std::vector<double> prev(order + 1);
    std::vector<double> next(order + 1);
    for (std::size_t n = 0; n < iterations; ++n) {
        for (std::size_t i = 0; i <= order; ++i) {
            prev[i] = t.at(i, n);
        }
        for (std::size_t i = 0; i <= order; ++i) {
            next[i] = implicit_order(i, r, u0, prev, next);
            t.at(i, n + 1) = next[i];
        }
    }
    return t;
}

double amplitude_closed_form(std::size_t i, double r, unsigned Z) {
    if (r == 1.0) {
        throw SingularityError("amplitude closed form has a pole at r = 1");
    }
    const double c = fuss_catalan(i, Z, {.max_order = i}).to_double();
    const double exponent = static_cast<double>((Z + 1) * i + 1);
    return c * std::pow(r, static_cast<double>(i)) / std::pow(1.0 - r, exponent);
}

double converged_amplitude(std::size_t i, double r, unsigned Z) {
    if (!(std::fabs(r) < 1.0)) {
        throw DomainError("explicit amplitudes converge only for |r| < 1");
    }
    return amplitude_closed_form(i, r, Z);
}

SettleResult settle(const AmplitudeTable& table, std::size_t i, SettleLimits limits) {
    std::size_t run = 0;
    const std::size_t last = table.iterations();
    for (std::size_t n = 1; n <= last; ++n) {
        const double a = table.at(i, n - 1);
        const double b = table.at(i, n);
        if (!std::isfinite(b)) {
            return {SettleStatus::Diverged, n};
        }
        const double scale = std::fmax(std::fabs(a), std::fabs(b));
        const bool still = std::fabs(b - a) <= limits.relative_tolerance * scale;
        run = still ? run + 1 : 0;
        if (run >= limits.window) {
            return {SettleStatus::Settled, n - limits.window};
        }
    }
    if (std::fabs(table.at(i, last)) > limits.blowup) {
        return {SettleStatus::Diverged, last};
    }
    return {SettleStatus::Unsettled, last};
}

}  // namespace dpistab
