#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace dpistab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Exact non-negative count. Catalan and Fuss-Catalan values are always >= 1.
class BigCount {
public:
    BigCount() = default;
    explicit BigCount(BigInt value) : value_(std::move(value)) {}

    const BigInt& value() const { return value_; }
    std::string str() const { return value_.str(); }

    /// Nearest double; +inf when the count exceeds the double range.
    double to_double() const;

    /// Value as mantissa * 2^exponent with mantissa in [1, 2). Never overflows.
    struct Scaled {
        double mantissa;
        std::int64_t exponent;
    };
    Scaled to_scaled() const;

    friend bool operator==(const BigCount&, const BigCount&) = default;
    friend bool operator==(const BigCount& a, std::uint64_t b) { return a.value_ == b; }

private:
    BigInt value_{1};
};

struct CoefficientLimits {
    std::size_t max_order = 64;
};

/// C(i) = (2i)! / (i! (i+1)!).
BigCount catalan(std::size_t i, CoefficientLimits limits = {});

/// Pfaff-Fuss-Catalan number C(i, Z) = binom((Z+1) i, i) / (Z i + 1). Throws DomainError for Z == 0.
BigCount fuss_catalan(std::size_t i, unsigned Z, CoefficientLimits limits = {});

/// binom(n, k) by multiplicative accumulation; every partial product is itself a binomial.
BigInt binomial(std::uint64_t n, std::uint64_t k);

/// Successive Fuss-Catalan numbers C(0,Z), C(1,Z), ... advanced by the exact
/// term ratio, so a long run costs one small multiply/divide chain per step.
class FussCatalanSequence {
public:
    explicit FussCatalanSequence(unsigned Z);

    std::size_t index() const { return index_; }
    const BigCount& current() const { return current_; }
    void advance();

private:
    unsigned Z_;
    std::size_t index_ = 0;
    BigCount current_;
};

}  // namespace dpistab
