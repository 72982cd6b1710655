#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dpistab/dpi.hpp"
#include "dpistab/kernels.hpp"

namespace dpistab {

/// One term a * d^m/dx_l^m of a constant-coefficient spatial operator (l is 1-based).
struct SymbolTerm {
    unsigned l = 1;
    unsigned m = 1;
    double a = 0.0;
};

class FourierSymbol {
public:
    FourierSymbol(unsigned d, std::vector<SymbolTerm> terms);

    unsigned dimension() const { return d_; }
    const std::vector<SymbolTerm>& terms() const { return terms_; }

private:
    unsigned d_;
    std::vector<SymbolTerm> terms_;
};

/// lambda(eta) = sum a_lm (i eta_l)^m.
std::complex<double> fourier_eigenvalue(const FourierSymbol& sym, std::span<const double> eta);

enum class Verdict { Stable, Unstable, Undecided };
std::string_view verdict_token(Verdict v);

struct FourierSample {
    std::vector<double> eta;
    double theta = 0.0;
    Verdict verdict = Verdict::Undecided;
};

struct FourierStability {
    double r = 0.0;  // max |lambda| over the grid
    double theta = 0.0;
    Verdict verdict = Verdict::Undecided;
    bool singular = false;  // r == 1
    std::vector<FourierSample> samples;
};

/// theta = r eps_hat / (1 - r)^2 with r = max |lambda(eta)|; stable iff |theta| <= 1/4.
/// With `record_samples`, each grid point also gets its own theta(eta) for contour plots.
FourierStability fourier_stability(const FourierSymbol& sym, const std::vector<std::vector<double>>& eta_grid,
                                   double eps_hat, bool record_samples = false);

/// CSV `eta1,...,etad,theta,verdict`.
void write_fourier_csv(std::ostream& os, const FourierStability& result, unsigned d);

/// 2 (cos(k pi/(M+1)) - 1), k = 1..M: spectrum of tridiag(1, -2, 1).
std::vector<double> tridiagonal_eigenvalues(std::size_t M);

/// Spectral radius of tridiag(1,-2,1) diag(1 + 2 u0(x_k)) per unit beta, by Sturm bisection.
double product_spectral_radius(std::size_t M);

/// Spectrum estimates for u_t = (u + u^2)_xx on [-1, 1], u0 = 1 - x^2, Dirichlet zeros.
///
/// r, V0, epsilon, eps_hat use the discrete grid k = 1..M. The *_continuous fields
/// maximize the same expressions over gamma in [0, 1]; true_radius is beta * product_spectral_radius(M).
struct PoissonSpectrum {
    std::size_t M = 0;
    double beta = 0.0;
    double r = 0.0;
    double V0 = 0.0;
    double epsilon = 0.0;
    double eps_hat = 0.0;
    double r_continuous = 0.0;
    double V0_continuous = 0.0;
    double true_radius = 0.0;
};

PoissonSpectrum poisson_spectrum(std::size_t M, double beta);

/// Largest beta with r eps_hat / (1 - r)^2 <= 1/4 for the poisson_spectrum estimates.
double analytic_cfl_bound(std::size_t M);

struct PoissonRun {
    std::size_t M = 100;
    double beta = 0.03;
    std::uint64_t max_iter = 100000;
    double tolerance = 1e-12;  // on max|u_{n+1} - u_n| / max(1, max|u_n|)
    double blowup = 1e10;
    /// (-1)^k perturbation added to the first iterate so unstable modes start above roundoff.
    double seed_amplitude = 1e-10;
    kernels::Residual residual = kernels::Residual::Nonlinear;
    bool record_history = false;
    kernels::Isa isa = kernels::active_isa();
};

/// Reads {"M": ..., "beta": ..., "max_iter": ...}; max_iter is optional.
PoissonRun poisson_run_from_json(const std::string& text);

struct PoissonResult {
    IterationOutcome outcome;  // final_value = max-norm of the last iterate
    std::vector<double> norm_history;  // max|u_n| for n = 0..iterations_used
    std::vector<double> solution;
};

/// Explicit DPI u_{n+1} = u0 + beta tridiag(1,-2,1)(u_n + u_n^2) on the interior points.
PoissonResult simulate_poisson(const PoissonRun& run);

/// CSV `step,max_norm`.
void write_norm_history_csv(std::ostream& os, const PoissonResult& result);

struct CflSearch {
    double lower = 1e-3;
    double upper = 1.0;
    double resolution = 5e-4;
    std::uint64_t max_iter = 100000;
    kernels::Residual residual = kernels::Residual::Nonlinear;
};

/// Bisection on beta with simulate_poisson as the oracle. Only blow-up counts as
/// unstable; MaxIterations is retried once with 10x budget.
double experimental_cfl_bound(std::size_t M, const CflSearch& search = {});

}  // namespace dpistab
