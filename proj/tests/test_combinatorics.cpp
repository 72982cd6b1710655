#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dpistab/combinatorics.hpp"
#include "dpistab/errors.hpp"

using namespace dpistab;

namespace {

BigInt factorial(unsigned n) {
    BigInt f = 1;
    for (unsigned k = 2; k <= n; ++k) {
        f *= k;
    }
    return f;
}

// Number of (Z+1)-ary trees with i internal nodes: T(i) = sum over compositions of i-1
// into Z+1 parts of the product of subtree counts.
std::vector<BigInt> tree_counts(unsigned Z, std::size_t n) {
    std::vector<BigInt> t(n + 1, 0);
    t[0] = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        // (Z+1)-fold convolution power of t[0..i-1], coefficient i-1
        std::vector<BigInt> p(i, 0);
        p[0] = 1;
        for (unsigned f = 0; f < Z + 1; ++f) {
            std::vector<BigInt> q(i, 0);
            for (std::size_t a = 0; a < i; ++a) {
                for (std::size_t b = 0; a + b < i; ++b) {
                    q[a + b] += p[a] * t[b];
                }
            }
            p = std::move(q);
        }
        t[i] = p[i - 1];
    }
    return t;
}

}  // namespace

TEST_CASE("catalan small values") {
    CHECK(catalan(0) == 1u);
    CHECK(catalan(3) == 5u);
    CHECK(catalan(10) == 16796u);
    const std::uint64_t seq[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862};
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(catalan(i) == seq[i]);
    }
}

TEST_CASE("catalan matches factorial formula up to the cap") {
    for (unsigned i = 0; i <= 64; ++i) {
        const BigInt expect = factorial(2 * i) / (factorial(i) * factorial(i + 1));
        CHECK(catalan(i).value() == expect);
    }
}

TEST_CASE("catalan satisfies the convolution recurrence") {
    std::vector<BigInt> c{1};
    for (std::size_t n = 0; n < 40; ++n) {
        BigInt s = 0;
        for (std::size_t k = 0; k <= n; ++k) {
            s += c[k] * c[n - k];
        }
        c.push_back(s);
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(catalan(i).value() == c[i]);
    }
}

TEST_CASE("catalan order cap") {
    CHECK_THROWS_AS(catalan(65), CapacityError);
    CHECK_NOTHROW(catalan(200, {200}));
    CHECK_THROWS_AS(fuss_catalan(10, 2, {9}), CapacityError);
}

TEST_CASE("fuss-catalan values") {
    CHECK(fuss_catalan(3, 1) == 5u);
    CHECK(fuss_catalan(0, 5) == 1u);
    CHECK(fuss_catalan(2, 2) == 3u);
    const std::uint64_t z2[] = {1, 1, 3, 12, 55, 273, 1428, 7752};
    const std::uint64_t z3[] = {1, 1, 4, 22, 140, 969, 7084};
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(fuss_catalan(i, 2) == z2[i]);
    }
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(fuss_catalan(i, 3) == z3[i]);
    }
}

TEST_CASE("fuss-catalan rejects Z = 0") { CHECK_THROWS_AS(fuss_catalan(3, 0), DomainError); }

TEST_CASE("fuss-catalan Z = 1 reduces to catalan") {
    for (std::size_t i = 0; i <= 64; ++i) {
        CHECK(fuss_catalan(i, 1) == catalan(i));
    }
}

TEST_CASE("fuss-catalan counts (Z+1)-ary trees") {
    for (unsigned Z = 1; Z <= 5; ++Z) {
        const auto t = tree_counts(Z, 20);
        for (std::size_t i = 0; i <= 20; ++i) {
            CHECK(fuss_catalan(i, Z).value() == t[i]);
        }
    }
}

TEST_CASE("fuss-catalan factorial form") {
    for (unsigned Z = 1; Z <= 5; ++Z) {
        for (unsigned i = 0; i <= 30; ++i) {
            const BigInt num = factorial((Z + 1) * i);
            const BigInt den = factorial(i) * factorial(Z * i + 1);
            CHECK(fuss_catalan(i, Z).value() == num / den);
            CHECK(num % den == 0);
        }
    }
}

TEST_CASE("binomial") {
    CHECK(binomial(6, 2) == 15);
    CHECK(binomial(10, 0) == 1);
    CHECK(binomial(10, 10) == 1);
    CHECK(binomial(3, 5) == 0);
    CHECK(binomial(100, 50) == factorial(100) / (factorial(50) * factorial(50)));
}

TEST_CASE("sequence walks the same values") {
    for (unsigned Z = 1; Z <= 6; ++Z) {
        FussCatalanSequence seq(Z);
        for (std::size_t i = 0; i <= 60; ++i) {
            REQUIRE(seq.index() == i);
            CHECK(seq.current() == fuss_catalan(i, Z));
            seq.advance();
        }
    }
}

TEST_CASE("conversion to double") {
    CHECK(catalan(10).to_double() == 16796.0);
    const double c64 = catalan(64).to_double();
    CHECK(c64 == doctest::Approx(factorial(128).convert_to<double>() /
                                 (factorial(64).convert_to<double>() * factorial(65).convert_to<double>())));
    FussCatalanSequence seq(1);
    while (seq.index() < 600) {
        seq.advance();
    }
    CHECK(std::isinf(seq.current().to_double()));
    const auto s = seq.current().to_scaled();
    CHECK(s.mantissa >= 1.0);
    CHECK(s.mantissa < 2.0);
    // log2 C(600) ~ 1200 - 1.5 log2(600) - 0.5 log2(pi)
    CHECK(static_cast<double>(s.exponent) == doctest::Approx(1200.0 - 1.5 * std::log2(600.0) - 0.5 * std::log2(std::numbers::pi)).epsilon(1e-3));
}
