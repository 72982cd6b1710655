#pragma once

// Data-parallel inner loops behind the DPI scans and the Poisson simulation.
//
// Every kernel has a scalar reference and, on x86-64, an AVX2 variant chosen at
// run time. Variants perform the same IEEE operations in the same order (no
// FMA), so their outputs are bitwise identical.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace dpistab::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Best ISA the CPU supports and this build contains.
Isa detect_isa();

/// detect_isa(), unless DPISTAB_ISA=scalar|avx2 asks for something else
/// (an unavailable request falls back to scalar).
Isa active_isa();

bool isa_available(Isa isa);

enum class LaneStatus : std::uint8_t { Converged = 0, Diverged = 1, MaxIterations = 2, Singular = 3 };

struct LaneLimits {
    std::uint64_t max_iter = 100000;
    double tolerance = 1e-12;
    double blowup = 1e10;
    double singular_pivot = 1e-14;
};

/// Terminal state of one scalar recurrence. `value` is the raw U at termination.
struct LaneResult {
    double value = 0.0;
    std::uint64_t iterations = 0;
    LaneStatus status = LaneStatus::MaxIterations;
};

/// Batched explicit DPI: U_{n+1} = u0 + r (1 + eps U_n^Z) U_n, U_0 = u0, one lane per point.
/// A lane stops at blow-up (|U| > blowup or non-finite) or when
/// |U_{n+1} - U_n| < tolerance * max(1, |U_n|).
void explicit_batch(Isa isa, std::span<const double> r, std::span<const double> eps,
                    std::span<const double> u0, unsigned Z, const LaneLimits& limits,
                    std::span<LaneResult> out);

/// Batched implicit DPI: (1 - r(1 + 2 eps U_n)) U_{n+1} = u0 - r eps U_n^2.
/// A lane whose pivot falls within singular_pivot of zero stops as Singular.
void implicit_batch(Isa isa, std::span<const double> r, std::span<const double> eps,
                    std::span<const double> u0, const LaneLimits& limits, std::span<LaneResult> out);

enum class Residual { Nonlinear, Linear };

/// The max fields are only meaningful when `finite` holds.
struct StencilStats {
    double max_abs_delta = 0.0;  // max |out - u|
    double max_abs_out = 0.0;    // max |out|
    bool finite = true;
};

/// One Picard sweep of the 1-D Poisson problem with Dirichlet zeros:
/// out_k = u0_k + beta ((w_{k-1} - 2 w_k) + w_{k+1}), w = u + u^2 (or w = u).
/// `padded` is scratch of size u.size() + 2.
StencilStats poisson_step(Isa isa, std::span<const double> u0, std::span<const double> u,
                          std::span<double> padded, std::span<double> out, double beta, Residual residual);

namespace detail {

void explicit_batch_scalar(const double* r, const double* eps, const double* u0, std::size_t n, unsigned Z,
                           const LaneLimits& limits, LaneResult* out);
void implicit_batch_scalar(const double* r, const double* eps, const double* u0, std::size_t n,
                           const LaneLimits& limits, LaneResult* out);
StencilStats poisson_step_scalar(const double* u0, const double* u, double* padded, double* out, std::size_t m,
                                 double beta, Residual residual);

#if defined(DPISTAB_HAVE_AVX2)
void explicit_batch_avx2(const double* r, const double* eps, const double* u0, std::size_t n, unsigned Z,
                         const LaneLimits& limits, LaneResult* out);
void implicit_batch_avx2(const double* r, const double* eps, const double* u0, std::size_t n,
                         const LaneLimits& limits, LaneResult* out);
StencilStats poisson_step_avx2(const double* u0, const double* u, double* padded, double* out, std::size_t m,
                               double beta, Residual residual);
#endif

}  // namespace detail

}  // namespace dpistab::kernels
