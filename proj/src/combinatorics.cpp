#include "dpistab/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpistab/errors.hpp"

namespace dpistab {

double BigCount::to_double() const {
    if (value_ == 0) {
        return 0.0;
    }
    const auto bits = boost::multiprecision::msb(value_);
    if (bits >= 1024) {
        return std::numeric_limits<double>::infinity();
    }
    return value_.convert_to<double>();
}

BigCount::Scaled BigCount::to_scaled() const {
    if (value_ == 0) {
        return {0.0, 0};
    }
    const auto msb = static_cast<std::int64_t>(boost::multiprecision::msb(value_));
    // Keep 63 significant bits; the double conversion rounds the rest.
    const std::int64_t shift = msb > 62 ? msb - 62 : 0;
    const BigInt top = value_ >> static_cast<unsigned>(shift);
    const double head = top.convert_to<double>();
    int e = 0;
    const double m = std::frexp(head, &e);  // head = m * 2^e, m in [0.5, 1)
    return {2.0 * m, shift + e - 1};
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) {
        return 0;
    }
    if (k > n - k) {
        k = n - k;
    }
    BigInt acc = 1;
    for (std::uint64_t j = 1; j <= k; ++j) {
        acc *= n - k + j;
        acc /= j;
    }
    return acc;
}

namespace {

void check_order(std::size_t i, const CoefficientLimits& limits) {
    if (i > limits.max_order) {
        throw CapacityError("coefficient order " + std::to_string(i) + " exceeds configured maximum " +
                            std::to_string(limits.max_order));
    }
}

}  // namespace

BigCount fuss_catalan(std::size_t i, unsigned Z, CoefficientLimits limits) {
    if (Z == 0) {
        throw DomainError("Fuss-Catalan degree Z must be >= 1");
    }
    check_order(i, limits);
    const std::uint64_t n = static_cast<std::uint64_t>(Z + 1) * i;
    const BigInt b = binomial(n, i);
    const std::uint64_t d = static_cast<std::uint64_t>(Z) * i + 1;
    BigInt q;
    BigInt rem;
    boost::multiprecision::divide_qr(b, BigInt(d), q, rem);
    if (rem != 0) {
        throw std::logic_error("binom((Z+1)i, i) not divisible by Zi+1");
    }
    return BigCount(std::move(q));
}

BigCount catalan(std::size_t i, CoefficientLimits limits) { return fuss_catalan(i, 1, limits); }

FussCatalanSequence::FussCatalanSequence(unsigned Z) : Z_(Z) {
    if (Z == 0) {
        throw DomainError("Fuss-Catalan degree Z must be >= 1");
    }
}

void FussCatalanSequence::advance() {
    // C(i+1)/C(i) = prod_{j=1}^{Z+1} ((Z+1)i + j) / ((i+1) prod_{j=2}^{Z+1} (Zi + j))
    const std::uint64_t i = index_;
    const std::uint64_t z = Z_;
    BigInt v = current_.value();
    for (std::uint64_t j = 1; j <= z + 1; ++j) {
        v *= (z + 1) * i + j;
    }
    BigInt den = i + 1;
    for (std::uint64_t j = 2; j <= z + 1; ++j) {
        den *= z * i + j;
    }
    v /= den;
    current_ = BigCount(std::move(v));
    ++index_;
}

}  // namespace dpistab
