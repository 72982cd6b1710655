#include <immintrin.h>

#include "dpistab/kernels.hpp"

namespace dpistab::kernels::detail {

namespace {

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    hi = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, hi));
}

// Write the lanes flagged in `bits` from `value` into out[0..3].
inline void record(int bits, __m256d value, std::uint64_t iterations, LaneStatus status, LaneResult* out) {
    alignas(32) double v[4];
    _mm256_store_pd(v, value);
    for (int lane = 0; lane < 4; ++lane) {
        if (bits & (1 << lane)) {
            out[lane] = {v[lane], iterations, status};
        }
    }
}

}  // namespace

void explicit_batch_avx2(const double* r, const double* eps, const double* u0, std::size_t n, unsigned Z,
                         const LaneLimits& limits, LaneResult* out) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d blowup = _mm256_set1_pd(limits.blowup);
    const __m256d tol = _mm256_set1_pd(limits.tolerance);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d rk = _mm256_loadu_pd(r + k);
        const __m256d ek = _mm256_loadu_pd(eps + k);
        const __m256d base = _mm256_loadu_pd(u0 + k);
        __m256d u = base;
        int active = 0xF;
        for (std::uint64_t it = 0; it < limits.max_iter && active; ++it) {
            __m256d p = u;
            for (unsigned j = 1; j < Z; ++j) {
                p = _mm256_mul_pd(p, u);
            }
            __m256d t = _mm256_mul_pd(ek, p);
            t = _mm256_add_pd(one, t);
            t = _mm256_mul_pd(rk, t);
            t = _mm256_mul_pd(t, u);
            const __m256d next = _mm256_add_pd(base, t);
            const int div = _mm256_movemask_pd(_mm256_cmp_pd(abs_pd(next), blowup, _CMP_NLE_UQ)) & active;
            const __m256d scale = _mm256_max_pd(one, abs_pd(u));
            const __m256d delta = abs_pd(_mm256_sub_pd(next, u));
            const int conv =
                _mm256_movemask_pd(_mm256_cmp_pd(delta, _mm256_mul_pd(tol, scale), _CMP_LT_OQ)) & active & ~div;
            if (div) {
                record(div, next, it + 1, LaneStatus::Diverged, out + k);
            }
            if (conv) {
                record(conv, next, it + 1, LaneStatus::Converged, out + k);
            }
            active &= ~(div | conv);
            const __m256d keep = _mm256_castsi256_pd(_mm256_set_epi64x(
                (active & 8) ? -1 : 0, (active & 4) ? -1 : 0, (active & 2) ? -1 : 0, (active & 1) ? -1 : 0));
            u = _mm256_blendv_pd(u, next, keep);
        }
        if (active) {
            record(active, u, limits.max_iter, LaneStatus::MaxIterations, out + k);
        }
    }
    if (k < n) {
        explicit_batch_scalar(r + k, eps + k, u0 + k, n - k, Z, limits, out + k);
    }
}

void implicit_batch_avx2(const double* r, const double* eps, const double* u0, std::size_t n,
                         const LaneLimits& limits, LaneResult* out) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d blowup = _mm256_set1_pd(limits.blowup);
    const __m256d tol = _mm256_set1_pd(limits.tolerance);
    const __m256d tiny = _mm256_set1_pd(limits.singular_pivot);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d rk = _mm256_loadu_pd(r + k);
        const __m256d ek = _mm256_loadu_pd(eps + k);
        const __m256d base = _mm256_loadu_pd(u0 + k);
        const __m256d re = _mm256_mul_pd(rk, ek);
        __m256d u = base;
        int active = 0xF;
        for (std::uint64_t it = 0; it < limits.max_iter && active; ++it) {
            __m256d q = _mm256_mul_pd(two, ek);
            q = _mm256_mul_pd(q, u);
            q = _mm256_add_pd(one, q);
            q = _mm256_mul_pd(rk, q);
            const __m256d pivot = _mm256_sub_pd(one, q);
            const int sing = _mm256_movemask_pd(_mm256_cmp_pd(abs_pd(pivot), tiny, _CMP_LT_OQ)) & active;
            __m256d num = _mm256_mul_pd(re, u);
            num = _mm256_mul_pd(num, u);
            num = _mm256_sub_pd(base, num);
            const __m256d next = _mm256_div_pd(num, pivot);
            const int div =
                _mm256_movemask_pd(_mm256_cmp_pd(abs_pd(next), blowup, _CMP_NLE_UQ)) & active & ~sing;
            const __m256d scale = _mm256_max_pd(one, abs_pd(u));
            const __m256d delta = abs_pd(_mm256_sub_pd(next, u));
            const int conv = _mm256_movemask_pd(_mm256_cmp_pd(delta, _mm256_mul_pd(tol, scale), _CMP_LT_OQ)) &
                             active & ~sing & ~div;
            if (sing) {
                record(sing, u, it + 1, LaneStatus::Singular, out + k);
            }
            if (div) {
                record(div, next, it + 1, LaneStatus::Diverged, out + k);
            }
            if (conv) {
                record(conv, next, it + 1, LaneStatus::Converged, out + k);
            }
            active &= ~(sing | div | conv);
            const __m256d keep = _mm256_castsi256_pd(_mm256_set_epi64x(
                (active & 8) ? -1 : 0, (active & 4) ? -1 : 0, (active & 2) ? -1 : 0, (active & 1) ? -1 : 0));
            u = _mm256_blendv_pd(u, next, keep);
        }
        if (active) {
            record(active, u, limits.max_iter, LaneStatus::MaxIterations, out + k);
        }
    }
    if (k < n) {
        implicit_batch_scalar(r + k, eps + k, u0 + k, n - k, limits, out + k);
    }
}

StencilStats poisson_step_avx2(const double* u0, const double* u, double* padded, double* out, std::size_t m,
                               double beta, Residual residual) {
    padded[0] = 0.0;
    padded[m + 1] = 0.0;
    std::size_t k = 0;
    if (residual == Residual::Nonlinear) {
        for (; k + 4 <= m; k += 4) {
            const __m256d v = _mm256_loadu_pd(u + k);
            _mm256_storeu_pd(padded + k + 1, _mm256_add_pd(v, _mm256_mul_pd(v, v)));
        }
        for (; k < m; ++k) {
            padded[k + 1] = u[k] + u[k] * u[k];
        }
    } else {
        for (; k < m; ++k) {
            padded[k + 1] = u[k];
        }
    }

    const __m256d b = _mm256_set1_pd(beta);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d huge = _mm256_set1_pd(1e300);
    __m256d max_out = _mm256_setzero_pd();
    __m256d max_delta = _mm256_setzero_pd();
    int bad = 0;
    k = 0;
    for (; k + 4 <= m; k += 4) {
        __m256d lap = _mm256_mul_pd(two, _mm256_loadu_pd(padded + k + 1));
        lap = _mm256_sub_pd(_mm256_loadu_pd(padded + k), lap);
        lap = _mm256_add_pd(lap, _mm256_loadu_pd(padded + k + 2));
        const __m256d next = _mm256_add_pd(_mm256_loadu_pd(u0 + k), _mm256_mul_pd(b, lap));
        _mm256_storeu_pd(out + k, next);
        const __m256d a = abs_pd(next);
        bad |= _mm256_movemask_pd(_mm256_cmp_pd(a, huge, _CMP_NLE_UQ));
        max_out = _mm256_max_pd(max_out, a);
        max_delta = _mm256_max_pd(max_delta, abs_pd(_mm256_sub_pd(next, _mm256_loadu_pd(u + k))));
    }
    StencilStats st;
    st.max_abs_out = hmax(max_out);
    st.max_abs_delta = hmax(max_delta);
    st.finite = bad == 0;
    for (; k < m; ++k) {
        double lap = 2.0 * padded[k + 1];
        lap = padded[k] - lap;
        lap = lap + padded[k + 2];
        const double next = u0[k] + beta * lap;
        out[k] = next;
        const double a = next < 0.0 ? -next : next;
        if (!(a <= 1e300)) {
            st.finite = false;
        }
        st.max_abs_out = a > st.max_abs_out ? a : st.max_abs_out;
        const double d = next - u[k];
        const double ad = d < 0.0 ? -d : d;
        st.max_abs_delta = ad > st.max_abs_delta ? ad : st.max_abs_delta;
    }
    return st;
}

}  // namespace dpistab::kernels::detail
