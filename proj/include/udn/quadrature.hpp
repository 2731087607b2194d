#pragma once

// Globally adaptive 15-point Gauss-Kronrod quadrature for scalar and
// fixed-length vector integrands. The interval with the largest error
// estimate is bisected until the total estimate meets the tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "udn/errors.hpp"

namespace udn {

struct QuadratureOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    std::size_t max_intervals = 4000;
};

struct QuadratureResult {
    std::vector<double> value;
    double error = 0.0; // max-norm error estimate over components
    std::size_t evaluations = 0;
};

struct ScalarQuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
};

namespace detail {

// QUADPACK qk15 abscissae and weights.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo;
    double hi;
    std::vector<double> value;
    double error;

    bool operator<(const Segment& other) const { return error < other.error; }
};

inline double max_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

template <class F>
Segment gauss_kronrod_15(F& f, double lo, double hi, std::size_t dim, std::vector<double>& scratch) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    std::vector<double> kronrod(dim, 0.0);
    std::vector<double> gauss(dim, 0.0);
    std::vector<double> left(dim);

    f(center, std::span<double>(scratch));
    for (std::size_t i = 0; i < dim; ++i) {
        kronrod[i] = kronrod_weights[7] * scratch[i];
        gauss[i] = gauss_weights[3] * scratch[i];
    }
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        f(center - dx, std::span<double>(left));
        f(center + dx, std::span<double>(scratch));
        for (std::size_t i = 0; i < dim; ++i) {
            const double pair = left[i] + scratch[i];
            kronrod[i] += kronrod_weights[j] * pair;
            if (j % 2 == 1) {
                gauss[i] += gauss_weights[j / 2] * pair;
            }
        }
    }
    double err = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        kronrod[i] *= half;
        gauss[i] *= half;
        err = std::max(err, std::abs(kronrod[i] - gauss[i]));
    }
    return Segment{lo, hi, std::move(kronrod), err};
}

} // namespace detail

/// Integrates a vector-valued integrand over [lo, hi]. The callable has the
/// signature void(double x, std::span<double> out) and fills dim components.
template <class F>
QuadratureResult integrate_vector(F&& f, double lo, double hi, std::size_t dim,
                                  const QuadratureOptions& opts = {}) {
    QuadratureResult result;
    result.value.assign(dim, 0.0);
    if (hi == lo) {
        return result;
    }
    if (!(hi > lo)) {
        throw DomainError("integrate: upper limit must exceed lower limit");
    }

    std::vector<double> scratch(dim);
    std::priority_queue<detail::Segment> work;
    work.push(detail::gauss_kronrod_15(f, lo, hi, dim, scratch));
    result.evaluations = 15;

    std::vector<double> total = work.top().value;
    double total_error = work.top().error;

    while (total_error > std::max(opts.abs_tol, opts.rel_tol * detail::max_norm(total))) {
        if (work.size() >= opts.max_intervals) {
            throw ConvergenceError("integrate: no convergence after " +
                                   std::to_string(opts.max_intervals) + " subintervals on [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        detail::Segment worst = work.top();
        work.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        auto left = detail::gauss_kronrod_15(f, worst.lo, mid, dim, scratch);
        auto right = detail::gauss_kronrod_15(f, mid, worst.hi, dim, scratch);
        result.evaluations += 30;
        for (std::size_t i = 0; i < dim; ++i) {
            total[i] += left.value[i] + right.value[i] - worst.value[i];
        }
        total_error += left.error + right.error - worst.error;
        work.push(std::move(left));
        work.push(std::move(right));
    }

    // Re-add from the pieces to shed the drift of incremental updates.
    std::fill(result.value.begin(), result.value.end(), 0.0);
    double error = 0.0;
    while (!work.empty()) {
        const auto& seg = work.top();
        for (std::size_t i = 0; i < dim; ++i) {
            result.value[i] += seg.value[i];
        }
        error += seg.error;
        work.pop();
    }
    result.error = error;
    return result;
}

/// Scalar convenience wrapper around integrate_vector.
template <class F>
ScalarQuadratureResult integrate(F&& f, double lo, double hi, const QuadratureOptions& opts = {}) {
    auto r = integrate_vector([&f](double x, std::span<double> out) { out[0] = f(x); }, lo, hi, 1,
                              opts);
    return {r.value[0], r.error, r.evaluations};
}

} // namespace udn
