#include <cstdlib>
#include <stdexcept>
#include <string>

#include "dpistab/kernels.hpp"

namespace dpistab::kernels {

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return "scalar";
        case Isa::Avx2:
            return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if defined(DPISTAB_HAVE_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Isa detect_isa() { return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() {
    static const Isa chosen = [] {
        const char* env = std::getenv("DPISTAB_ISA");
        if (env == nullptr) {
            return detect_isa();
        }
        const std::string want(env);
        if (want == "avx2" && isa_available(Isa::Avx2)) {
            return Isa::Avx2;
        }
        if (want == "scalar" || want == "avx2") {
            return Isa::Scalar;
        }
        return detect_isa();
    }();
    return chosen;
}

namespace {

void check_lengths(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    if (a != b || a != c || a != d) {
        throw std::invalid_argument("batch kernel spans differ in length");
    }
}

[[maybe_unused]] Isa usable(Isa isa) { return isa_available(isa) ? isa : Isa::Scalar; }

}  // namespace

void explicit_batch(Isa isa, std::span<const double> r, std::span<const double> eps,
                    std::span<const double> u0, unsigned Z, const LaneLimits& limits,
                    std::span<LaneResult> out) {
    check_lengths(r.size(), eps.size(), u0.size(), out.size());
#if defined(DPISTAB_HAVE_AVX2)
    if (usable(isa) == Isa::Avx2) {
        detail::explicit_batch_avx2(r.data(), eps.data(), u0.data(), r.size(), Z, limits, out.data());
        return;
    }
#endif
    detail::explicit_batch_scalar(r.data(), eps.data(), u0.data(), r.size(), Z, limits, out.data());
}

void implicit_batch(Isa isa, std::span<const double> r, std::span<const double> eps,
                    std::span<const double> u0, const LaneLimits& limits, std::span<LaneResult> out) {
    check_lengths(r.size(), eps.size(), u0.size(), out.size());
#if defined(DPISTAB_HAVE_AVX2)
    if (usable(isa) == Isa::Avx2) {
        detail::implicit_batch_avx2(r.data(), eps.data(), u0.data(), r.size(), limits, out.data());
        return;
    }
#endif
    detail::implicit_batch_scalar(r.data(), eps.data(), u0.data(), r.size(), limits, out.data());
}

StencilStats poisson_step(Isa isa, std::span<const double> u0, std::span<const double> u,
                          std::span<double> padded, std::span<double> out, double beta, Residual residual) {
    const std::size_t m = u.size();
    if (u0.size() != m || out.size() != m || padded.size() != m + 2) {
        throw std::invalid_argument("poisson_step spans have inconsistent sizes");
    }
#if defined(DPISTAB_HAVE_AVX2)
    if (usable(isa) == Isa::Avx2) {
        return detail::poisson_step_avx2(u0.data(), u.data(), padded.data(), out.data(), m, beta, residual);
    }
#endif
    return detail::poisson_step_scalar(u0.data(), u.data(), padded.data(), out.data(), m, beta, residual);
}

}  // namespace dpistab::kernels
