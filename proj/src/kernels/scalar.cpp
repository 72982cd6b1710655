#include <cmath>

#include "dpistab/kernels.hpp"

namespace dpistab::kernels::detail {

void explicit_batch_scalar(const double* r, const double* eps, const double* u0, std::size_t n, unsigned Z,
                           const LaneLimits& limits, LaneResult* out) {
    for (std::size_t k = 0; k < n; ++k) {
        const double rk = r[k];
        const double ek = eps[k];
        const double base = u0[k];
        double u = base;
        LaneResult res{u, limits.max_iter, LaneStatus::MaxIterations};
        for (std::uint64_t it = 0; it < limits.max_iter; ++it) {
            double p = u;
            for (unsigned j = 1; j < Z; ++j) {
                p = p * u;
            }
            double t = ek * p;
            t = 1.0 + t;
            t = rk * t;
            t = t * u;
            const double next = base + t;
            if (!(std::fabs(next) <= limits.blowup)) {
                res = {next, it + 1, LaneStatus::Diverged};
                break;
            }
            const double scale = std::fmax(1.0, std::fabs(u));
            if (std::fabs(next - u) < limits.tolerance * scale) {
                res = {next, it + 1, LaneStatus::Converged};
                break;
            }
            u = next;
            res.value = u;
        }
        out[k] = res;
    }
}

void implicit_batch_scalar(const double* r, const double* eps, const double* u0, std::size_t n,
                           const LaneLimits& limits, LaneResult* out) {
    for (std::size_t k = 0; k < n; ++k) {
        const double rk = r[k];
        const double ek = eps[k];
        const double base = u0[k];
        const double re = rk * ek;
        double u = base;
        LaneResult res{u, limits.max_iter, LaneStatus::MaxIterations};
        for (std::uint64_t it = 0; it < limits.max_iter; ++it) {
            double q = 2.0 * ek;
            q = q * u;
            q = 1.0 + q;
            q = rk * q;
            const double pivot = 1.0 - q;
            if (std::fabs(pivot) < limits.singular_pivot) {
                res = {u, it + 1, LaneStatus::Singular};
                break;
            }
            double num = re * u;
            num = num * u;
            num = base - num;
            const double next = num / pivot;
            if (!(std::fabs(next) <= limits.blowup)) {
                res = {next, it + 1, LaneStatus::Diverged};
                break;
            }
            const double scale = std::fmax(1.0, std::fabs(u));
            if (std::fabs(next - u) < limits.tolerance * scale) {
                res = {next, it + 1, LaneStatus::Converged};
                break;
            }
            u = next;
            res.value = u;
        }
        out[k] = res;
    }
}

StencilStats poisson_step_scalar(const double* u0, const double* u, double* padded, double* out, std::size_t m,
                                 double beta, Residual residual) {
    padded[0] = 0.0;
    padded[m + 1] = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double v = u[k];
        padded[k + 1] = residual == Residual::Nonlinear ? v + v * v : v;
    }
    StencilStats st;
    for (std::size_t k = 0; k < m; ++k) {
        double lap = 2.0 * padded[k + 1];
        lap = padded[k] - lap;
        lap = lap + padded[k + 2];
        const double next = u0[k] + beta * lap;
        out[k] = next;
        const double a = std::fabs(next);
        if (!(a <= 1e300)) {
            st.finite = false;
        }
        st.max_abs_out = std::fmax(st.max_abs_out, a);
        st.max_abs_delta = std::fmax(st.max_abs_delta, std::fabs(next - u[k]));
    }
    return st;
}

}  // namespace dpistab::kernels::detail
