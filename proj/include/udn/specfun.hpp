#pragma once

// Special functions used by the coverage analysis: the Gauss hypergeometric
// function on the half line z <= 0, the omega shorthand built on it, rising
// factorials and complete Bell polynomials.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "udn/errors.hpp"

namespace udn {

struct Hyp2F1Params {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double z = 0.0;
};

namespace specfun_limits {
inline constexpr double series_tolerance = 1e-15;
inline constexpr int max_series_terms = 10000;
} // namespace specfun_limits

namespace detail {

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + carry; }
};

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && std::floor(x) == x;
}

} // namespace detail

/// Gauss hypergeometric function 2F1(a, b; c; z) for real z <= 0.
///
/// For z < 0 the Pfaff transformation
///   2F1(a, b; c; z) = (1 - z)^(-a) 2F1(a, c - b; c; z / (z - 1))
/// maps the argument into [0, 1), where the power series converges. In the
/// parameter region used here (c - b = 1) every transformed term is
/// positive, so the sum is free of cancellation.
inline double hyp2f1(const Hyp2F1Params& p) {
    if (detail::is_nonpositive_integer(p.c)) {
        throw DomainError("hyp2f1: c must not be zero or a negative integer (c = " +
                          std::to_string(p.c) + ")");
    }
    if (!(p.z <= 0.0)) {
        throw DomainError("hyp2f1: only z <= 0 is supported (z = " + std::to_string(p.z) + ")");
    }
    if (p.z == 0.0) {
        return 1.0;
    }

    const double w = p.z / (p.z - 1.0);
    const double a = p.a;
    const double b = p.c - p.b;
    const double c = p.c;

    detail::CompensatedSum series;
    series.add(1.0);
    double term = 1.0;
    for (int n = 0; n < specfun_limits::max_series_terms; ++n) {
        const double dn = static_cast<double>(n);
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * w;
        series.add(term);
        if (term == 0.0 ||
            std::abs(term) < specfun_limits::series_tolerance * std::abs(series.value())) {
            return std::pow(1.0 - p.z, -a) * series.value();
        }
    }
    throw ConvergenceError("hyp2f1: series did not converge within " +
                           std::to_string(specfun_limits::max_series_terms) +
                           " terms (a = " + std::to_string(p.a) + ", b = " + std::to_string(p.b) +
                           ", c = " + std::to_string(p.c) + ", z = " + std::to_string(p.z) + ")");
}

inline double hyp2f1(double a, double b, double c, double z) {
    return hyp2f1(Hyp2F1Params{a, b, c, z});
}

/// omega(x, y, z) = 2F1(x, -2/y, 1 - 2/y, -z). Requires y > 2, z >= 0, x >= 1.
inline double omega(double x, double y, double z) {
    if (!(y > 2.0)) {
        throw DomainError("omega: pathloss exponent must exceed 2 (y = " + std::to_string(y) + ")");
    }
    if (!(z >= 0.0)) {
        throw DomainError("omega: threshold must be non-negative (z = " + std::to_string(z) + ")");
    }
    if (!(x >= 1.0)) {
        throw DomainError("omega: first parameter must be >= 1 (x = " + std::to_string(x) + ")");
    }
    const double delta = 2.0 / y;
    return hyp2f1(x, -delta, 1.0 - delta, -z);
}

/// Pochhammer symbol x (x + 1) ... (x + m - 1).
inline double rising_factorial(double x, unsigned m) {
    double r = 1.0;
    for (unsigned i = 0; i < m; ++i) {
        r *= x + static_cast<double>(i);
    }
    return r;
}

/// Complete Bell polynomials B_0 .. B_k evaluated at x_1 .. x_k, where
/// derivs[m - 1] holds x_m.
inline std::vector<double> complete_bell_sequence(std::span<const double> derivs, std::size_t k) {
    if (derivs.size() < k) {
        throw DomainError("complete_bell: need at least k arguments");
    }
    std::vector<double> bell(k + 1, 0.0);
    std::vector<double> binom(k + 1, 0.0); // row n of Pascal's triangle
    bell[0] = 1.0;
    binom[0] = 1.0;
    for (std::size_t n = 0; n < k; ++n) {
        double next = 0.0;
        for (std::size_t j = 0; j <= n; ++j) {
            next += binom[j] * bell[n - j] * derivs[j];
        }
        bell[n + 1] = next;
        for (std::size_t j = n + 1; j > 0; --j) {
            binom[j] += binom[j - 1];
        }
    }
    return bell;
}

inline double complete_bell(std::span<const double> derivs, std::size_t k) {
    return complete_bell_sequence(derivs, k)[k];
}

} // namespace udn
