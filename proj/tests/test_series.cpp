#include <doctest.h>

#include <cmath>

#include "dpistab/errors.hpp"
#include "dpistab/series.hpp"

using namespace dpistab;

namespace {

// sum_{i=1}^{terms} C(i) th^i with C(i+1) = C(i) 2(2i+1)/(i+2) in doubles
double catalan_sum(double th, int terms) {
    double c = 1.0;
    double p = 1.0;
    double s = 0.0;
    for (int i = 0; i < terms; ++i) {
        c *= 2.0 * (2.0 * i + 1.0) / (i + 2.0);
        p *= th;
        s += c * p;
    }
    return s;
}

// B = 1 + th B^(Z+1), the Fuss-Catalan generating function
double generating_function(double th, unsigned Z) {
    double b = 1.0;
    for (int it = 0; it < 100000; ++it) {
        const double next = 1.0 + th * std::pow(b, Z + 1);
        if (std::fabs(next - b) < 1e-16) {
            return next;
        }
        b = next;
    }
    return b;
}

// Brute-force fixed point of U = 1 + r (1 + e U) U
double fixed_point(double r, double e) {
    double u = 1.0;
    for (int it = 0; it < 1000000; ++it) {
        const double next = 1.0 + r * (1.0 + e * u) * u;
        if (next == u) {
            break;
        }
        u = next;
    }
    return u;
}

}  // namespace

TEST_CASE("theta") {
    CHECK(theta({0.5, 0.1, 1}) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(theta({0.5, 0.1, 2}) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(theta({0.3, 0.0, 3}) == 0.0);
    CHECK(theta({2.0, 0.0, 1}) == 0.0);
    CHECK_THROWS_AS(theta({1.0, 0.1, 1}), SingularityError);
}

TEST_CASE("theta_max exact and floating") {
    const std::pair<long, long> expect[] = {{1, 4}, {4, 27}, {27, 256}, {256, 3125}, {3125, 46656}};
    for (unsigned Z = 1; Z <= 5; ++Z) {
        const BigRational q(expect[Z - 1].first, expect[Z - 1].second);
        CHECK(theta_max_exact(Z) == q);
        CHECK(theta_max(Z) == doctest::Approx(static_cast<double>(expect[Z - 1].first) / expect[Z - 1].second).epsilon(1e-15));
    }
    CHECK(theta_max(1) == 0.25);
    CHECK(theta_max(40) > 0.0);
}

TEST_CASE("radius predicate") {
    CHECK(theta_within_radius(0.25, 1));
    CHECK_FALSE(theta_within_radius(0.2500001, 1));
    CHECK(theta_within_radius(-0.25, 1));
    CHECK_FALSE(theta_within_radius(-0.3, 1));
    CHECK(theta_within_radius(4.0 / 27.0, 2));
}

TEST_CASE("nonlinear shift") {
    CHECK(nonlinear_shift({0.5, 0.0, 1}) == 0.0);
    CHECK(nonlinear_shift({0.5, 0.125, 1}) == doctest::Approx(2.0).epsilon(1e-14));
    const double oracle = catalan_sum(theta({0.2, 0.1, 1}), 200) / 0.8;
    CHECK(nonlinear_shift({0.2, 0.1, 1}) == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(nonlinear_shift({0.2, 0.1, 1}) == doctest::Approx(0.0417130661302931).epsilon(1e-13));
    CHECK_THROWS_AS(nonlinear_shift({0.5, 0.2, 1}), DivergenceError);
    CHECK_THROWS_AS(nonlinear_shift({0.5, 0.1, 2}), DomainError);
}

TEST_CASE("converged solution") {
    CHECK(converged_solution({0.5, 0.0, 1}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(converged_solution({0.0, 0.7, 1}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(converged_solution({0.5, 0.125, 1}) == doctest::Approx(4.0).epsilon(1e-14));
    for (double r : {0.1, 0.3, 0.5}) {
        for (double e : {0.05, 0.2, 0.4}) {
            if (theta({r, e, 1}) > 0.2) {
                continue;
            }
            CHECK(converged_solution({r, e, 1}) == doctest::Approx(fixed_point(r, e)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(converged_solution({0.9, 1.0, 1}), DivergenceError);
}

TEST_CASE("explicit border Z = 1") {
    CHECK(explicit_border_r(0.0, 1).r_max == 1.0);
    CHECK(explicit_border_r(1.0, 1).r_max == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-14));
    for (double e = 0.1; e < 5.0; e += 0.3) {
        const auto b = explicit_border_r(e, 1);
        CHECK(b.r_max == doctest::Approx(1.0 + 2.0 * e - 2.0 * std::sqrt(e + e * e)).epsilon(1e-10));
        CHECK(b.theta_at_border == doctest::Approx(0.25).epsilon(1e-12));
    }
    CHECK(explicit_border_r(1e8, 1).r_max > 0.0);
    CHECK_THROWS_AS(explicit_border_r(-0.1, 1), DomainError);
}

TEST_CASE("explicit border higher degree") {
    const auto b = explicit_border_r(0.1, 2);
    const double rt = 1.0 - b.r_max;
    CHECK(rt * rt * rt + 0.675 * rt == doctest::Approx(0.675).epsilon(1e-11));
    CHECK(b.theta_at_border == doctest::Approx(4.0 / 27.0).epsilon(1e-10));
    CHECK(b.r_max == doctest::Approx(0.3701592152578206).epsilon(1e-10));
    for (unsigned Z = 2; Z <= 5; ++Z) {
        for (double e : {0.01, 0.2, 1.0, 3.0}) {
            const auto v = explicit_border_r(e, Z);
            CHECK(v.r_max > 0.0);
            CHECK(v.r_max < 1.0);
            CHECK(theta({v.r_max, e, Z}) == doctest::Approx(theta_max(Z)).epsilon(1e-9));
        }
    }
    // border moves inward as eps_hat grows
    CHECK(explicit_border_r(0.5, 3).r_max < explicit_border_r(0.2, 3).r_max);
}

TEST_CASE("implicit gap") {
    const auto g0 = implicit_gap(0.0);
    CHECK(g0.r_low == 1.0);
    CHECK(g0.r_high == 1.0);
    const auto g1 = implicit_gap(1.0);
    CHECK(g1.r_low == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(g1.r_high == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-14));
    const auto g2 = implicit_gap(0.25);
    CHECK(g2.r_low == doctest::Approx(1.5 - 2.0 * std::sqrt(0.3125)).epsilon(1e-14));
    CHECK(g2.r_high == doctest::Approx(1.5 + 2.0 * std::sqrt(0.3125)).epsilon(1e-14));
    for (double e : {0.001, 0.05, 0.25, 1.0, 10.0, 1e6}) {
        const auto g = implicit_gap(e);
        CHECK(std::fabs(g.r_low * g.r_high - 1.0) < 1e-12);
        CHECK(theta({g.r_low, e, 1}) == doctest::Approx(0.25).epsilon(1e-10));
        CHECK(theta({g.r_high, e, 1}) == doctest::Approx(0.25).epsilon(1e-10));
    }
    CHECK_THROWS_AS(implicit_gap(-1.0), DomainError);
}

TEST_CASE("shift partial sums") {
    CHECK(shift_partial_sum(0.0, 3, 50) == 0.0);
    CHECK(shift_partial_sum(0.2, 1, 100) == doctest::Approx(0.3819660112501051).epsilon(1e-11));
    CHECK(shift_partial_sum(0.1, 1, 200) == doctest::Approx(catalan_sum(0.1, 200)).epsilon(1e-14));
    double prev = 0.0;
    for (std::size_t n : {10, 100, 1000, 10000}) {
        const double s = shift_partial_sum(0.25, 1, n);
        CHECK(s > prev);
        CHECK(s < 1.0);
        prev = s;
    }
    CHECK(prev > 0.98);
    CHECK(shift_partial_sum(0.1, 2, 0) == 0.0);
}

TEST_CASE("series matches the generating function") {
    for (unsigned Z = 1; Z <= 5; ++Z) {
        for (double f : {0.1, 0.5, 0.8}) {
            const double th = f * theta_max(Z);
            const auto s = shift_series(th, Z);
            CHECK(s.converged);
            CHECK(1.0 + s.value == doctest::Approx(generating_function(th, Z)).epsilon(1e-12));
        }
    }
    const auto capped = shift_series(0.25, 1, {1e-15, 50});
    CHECK_FALSE(capped.converged);
    CHECK(capped.terms == 50);
}

TEST_CASE("series solution agrees with the Z = 1 closed form") {
    for (double r : {0.1, 0.4}) {
        for (double e : {0.01, 0.1}) {
            const StabilityPoint p{r, e, 1};
            CHECK(series_solution(p) == doctest::Approx(converged_solution(p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("ratio test approaches one") {
    for (unsigned Z = 1; Z <= 5; ++Z) {
        CHECK(std::fabs(normalized_ratio(200, Z) - 1.0) < 0.02);
        CHECK(std::fabs(normalized_ratio(2000, Z) - 1.0) < std::fabs(normalized_ratio(200, Z) - 1.0));
    }
}
