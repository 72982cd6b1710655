#pragma once

#include <cstddef>
#include <vector>

namespace dpistab {

/// Perturbation amplitudes u_{i,n} of U_n = sum_i u_{i,n} eps^i.
///
/// Stored raw (not normalized); row n = 0 always holds the initial condition
/// U_0 = u0 + 0 eps + 0 eps^2 + ...
class AmplitudeTable {
public:
    AmplitudeTable(std::size_t order, std::size_t iterations, double r, double u0, unsigned Z);

    std::size_t order() const { return order_; }
    std::size_t iterations() const { return iterations_; }
    double r() const { return r_; }
    double u0() const { return u0_; }
    unsigned Z() const { return Z_; }

    double& at(std::size_t i, std::size_t n) { return data_[n * (order_ + 1) + i]; }
    double at(std::size_t i, std::size_t n) const { return data_[n * (order_ + 1) + i]; }

    /// u_{i,n} / u0^(Z i + 1); for Z = 1 this is the usual u_{i,n}/u0^(i+1).
    double normalized(std::size_t i, std::size_t n) const;

    /// True when u_{i,n} overflowed to a non-finite value.
    bool overflowed(std::size_t i, std::size_t n) const;

private:
    std::size_t order_;
    std::size_t iterations_;
    double r_;
    double u0_;
    unsigned Z_;
    std::vector<double> data_;
};

/// Explicit cascade: matching eps^i in U_{n+1} = U_0 + r U_n + r eps U_n^(Z+1).
/// The eps-expansion of U_n^(Z+1) is built by Z truncated convolutions.
AmplitudeTable explicit_cascade(double r, double u0, unsigned Z, std::size_t order, std::size_t iterations);

/// Implicit cascade of (1 - r(1 + 2 eps U_n)) U_{n+1} = u0 - r eps U_n^2.
///
/// Each order is solved with the lower orders substituted by their
/// n-independent values, so every row n >= 1 is computed along the same
/// arithmetic path and rows are bitwise identical. Throws SingularityError at r == 1.
AmplitudeTable implicit_cascade(double r, double u0, std::size_t order, std::size_t iterations = 1);

/// Same recurrence iterated honestly from U_0 = u0. Order i settles only for n >= i + 1.
AmplitudeTable implicit_cascade_from_initial_condition(double r, double u0, std::size_t order,
                                                       std::size_t iterations);

/// Converged explicit amplitude, normalized: C(i,Z) r^i / (1-r)^((Z+1) i + 1).
/// Throws DomainError when |r| >= 1 (outside the explicit convergence domain).
double converged_amplitude(std::size_t i, double r, unsigned Z = 1);

/// Same closed form without the |r| < 1 restriction (implicit amplitudes).
double amplitude_closed_form(std::size_t i, double r, unsigned Z = 1);

enum class SettleStatus { Settled, Diverged, Unsettled };

struct SettleResult {
    SettleStatus status = SettleStatus::Unsettled;
    std::size_t n_used = 0;  // first n of the settled window, or the last n inspected
};

struct SettleLimits {
    double relative_tolerance = 1e-12;
    std::size_t window = 10;
    double blowup = 1e12;
};

/// Convergence of order i along n: relative change below tolerance for `window`
/// consecutive steps. Blow-up is only declared for orders that never settle.
SettleResult settle(const AmplitudeTable& table, std::size_t i, SettleLimits limits = {});

}  // namespace dpistab
