#pragma once

// Semi-analytical coverage, spatial throughput and critical density of a
// zero-forcing SDMA downlink in a Poisson field of base stations.
//
// Fading model: the typical link sees H ~ Gamma(N_a - N_U + 1, 1), every
// interferer G ~ Gamma(N_U, 1). With s = tau / (P l(d0)),
//
//   CP = E_r0[ sum_{k=0}^{N_a-N_U} (-s)^k / k! d^k/ds^k exp(-eta(s)) ],
//   eta(s) = 2 pi lambda int_{d0}^inf x (1 - (1 + s P l(x))^(-N_U)) dx,
//
// and the k-th derivative of exp(-eta) is assembled from eta's own
// derivatives through complete Bell polynomials.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "udn/errors.hpp"
#include "udn/network.hpp"
#include "udn/pathloss.hpp"
#include "udn/quadrature.hpp"
#include "udn/specfun.hpp"

namespace udn {

/// An operation was called outside the configuration it is defined for.
class ContractViolation : public DomainError {
public:
    using DomainError::DomainError;
};

/// Throughput has no interior maximum in the searched density range.
class NoInteriorMaximum : public Error {
public:
    using Error::Error;
};

/// A fitted coverage decay rate was not positive.
class ScalingLawViolation : public Error {
public:
    using Error::Error;
};

struct CoverageResult {
    double cp = 0.0;
    double quadrature_error = 0.0; // absolute, outer r0 integration incl. truncation
    int k_terms = 0;
};

struct SweepRow {
    double lambda_bs = 0.0; // m^-2
    double cp = 0.0;
    double st = 0.0; // bps/Hz/m^2
};

struct SweepResult {
    Scheme scheme = Scheme::su_bf;
    NetworkConfig config;
    std::vector<SweepRow> rows; // ascending lambda_bs
};

struct ScalingFit {
    double kappa = 0.0; // m^2
    double r_squared = 0.0;
    std::size_t points = 0;
};

enum class CoverageMethod { exact, approx };

namespace analytic_limits {
// The r0 expectation is truncated where exp(-pi lambda r0^2) drops below this.
inline constexpr double outer_truncation = 1e-12;
inline constexpr double outer_rel_tol = 1e-10;
inline constexpr double inner_rel_tol = 1e-9;
inline constexpr double golden_rel_tol = 5e-3;
inline constexpr int argmax_grid_points = 41;
} // namespace analytic_limits

namespace detail {

// Returns y_m = s^m eta^(m)(s), m = 0..max_order, where sp = s * P. Scaling
// by s^m keeps every entry O(1) regardless of the serving distance.
inline std::vector<double> scaled_exponent_derivs(const NetworkConfig& cfg,
                                                  const PathlossModel& model, double d0,
                                                  double sp, int max_order) {
    const auto dim = static_cast<std::size_t>(max_order) + 1;
    const double users = cfg.n_users;
    std::vector<double> integral(dim, 0.0);

    // Finite slopes between d0 and R_(N-1), integrated numerically.
    double lo = d0;
    const auto bps = model.breakpoints();
    for (double hi : bps) {
        if (hi <= lo) {
            continue;
        }
        const std::size_t seg = model.segment_of(lo);
        const double k = model.constants()[seg];
        const double alpha = model.exponents()[seg];
        auto integrand = [&](double x, std::span<double> out) {
            const double u = sp * k * std::pow(x, -alpha);
            out[0] = -x * std::expm1(-users * std::log1p(u));
            double term = x * std::pow(1.0 + u, -users);
            const double ratio = u / (1.0 + u);
            for (std::size_t m = 1; m < out.size(); ++m) {
                term *= ratio;
                out[m] = term;
            }
        };
        const auto r = integrate_vector(integrand, lo, hi, dim,
                                        {.rel_tol = analytic_limits::inner_rel_tol});
        for (std::size_t m = 0; m < dim; ++m) {
            integral[m] += r.value[m];
        }
        lo = hi;
    }

    // Final slope to infinity in closed form.
    const double d = lo;
    const double alpha = model.final_exponent();
    const double delta = 2.0 / alpha;
    const double u0 = sp * model.final_constant() * std::pow(d, -alpha);
    integral[0] += 0.5 * d * d * (hyp2f1(users, -delta, 1.0 - delta, -u0) - 1.0);
    for (std::size_t m = 1; m < dim; ++m) {
        const double p = static_cast<double>(m) - delta;
        integral[m] += d * d * std::pow(u0, static_cast<double>(m)) / (alpha * p) *
                       hyp2f1(users + static_cast<double>(m), p, p + 1.0, -u0);
    }

    const double scale = 2.0 * std::numbers::pi * cfg.lambda_bs;
    std::vector<double> y(dim);
    y[0] = scale * integral[0];
    for (std::size_t m = 1; m < dim; ++m) {
        const double sign = (m % 2 == 1) ? 1.0 : -1.0;
        y[m] = sign * scale * rising_factorial(users, static_cast<unsigned>(m)) * integral[m];
    }
    return y;
}

// Conditional coverage given the serving distance d0: the bracketed sum
// of the coverage expression evaluated at s = tau / (P l(d0)).
inline double conditional_coverage(const NetworkConfig& cfg, const PathlossModel& model,
                                   double d0) {
    const int order = cfg.n_antennas - cfg.n_users;
    const double sp = cfg.tau / model.loss_at(d0);
    const auto y = scaled_exponent_derivs(cfg, model, d0, sp, order);

    // (-s)^k B_k(-eta', ..., -eta^(k)) = B_k(|y_1|, ..., |y_k|) by homogeneity,
    // since sign(eta^(m)) = (-1)^(m+1).
    std::vector<double> args(static_cast<std::size_t>(order));
    for (int m = 1; m <= order; ++m) {
        args[m - 1] = std::abs(y[m]);
    }
    const auto bell = complete_bell_sequence(args, static_cast<std::size_t>(order));
    double sum = 0.0;
    double factorial = 1.0;
    for (int k = 0; k <= order; ++k) {
        if (k > 0) {
            factorial *= k;
        }
        sum += bell[k] / factorial;
    }
    return std::exp(-y[0]) * sum;
}

} // namespace detail

/// Derivatives eta^(m)(s), m = 0..max_order, of the interference Laplace
/// exponent seen from serving distance d0.
inline std::vector<double> laplace_exponent_derivs(const NetworkConfig& cfg,
                                                   const PathlossModel& model, double d0,
                                                   double s, int max_order) {
    cfg.validate();
    if (!(d0 >= cfg.delta_h) || !(d0 > 0.0)) {
        throw DomainError("laplace_exponent_derivs: need d0 >= delta_h and d0 > 0");
    }
    if (!(s > 0.0)) {
        throw DomainError("laplace_exponent_derivs: need s > 0");
    }
    if (max_order < 0) {
        throw DomainError("laplace_exponent_derivs: max_order must be non-negative");
    }
    auto y = detail::scaled_exponent_derivs(cfg, model, d0, s * cfg.power, max_order);
    double s_pow = 1.0;
    for (std::size_t m = 1; m < y.size(); ++m) {
        s_pow *= s;
        y[m] /= s_pow;
    }
    return y;
}

/// Exact coverage probability, averaging the conditional coverage over the
/// nearest-BS distance r0 ~ 2 pi lambda r exp(-pi lambda r^2).
inline CoverageResult coverage_exact(const NetworkConfig& cfg, const PathlossModel& model) {
    cfg.validate();
    const double pl = std::numbers::pi * cfg.lambda_bs;
    const double t_max = -std::log(analytic_limits::outer_truncation);
    const double dh2 = cfg.delta_h * cfg.delta_h;

    // Substituting t = pi lambda r0^2 turns the expectation into
    // int_0^inf e^-t h(t) dt. Split where d0 crosses a breakpoint.
    std::vector<double> cuts{0.0};
    for (double r : model.breakpoints()) {
        const double r0_sq = r * r - dh2;
        if (r0_sq > 0.0 && pl * r0_sq < t_max) {
            cuts.push_back(pl * r0_sq);
        }
    }
    cuts.push_back(t_max);

    auto integrand = [&](double t) {
        const double d0 = std::sqrt(t / pl + dh2);
        return std::exp(-t) * detail::conditional_coverage(cfg, model, d0);
    };

    double cp = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const auto r = integrate(integrand, cuts[i], cuts[i + 1],
                                 {.rel_tol = analytic_limits::outer_rel_tol, .abs_tol = 1e-15});
        cp += r.value;
        err += r.error;
    }
    err += analytic_limits::outer_truncation;

    const double slack = 1e-9 + err;
    if (!(cp >= -slack && cp <= 1.0 + slack)) {
        throw NumericError("coverage_exact: coverage " + std::to_string(cp) +
                           " outside [0, 1] at lambda = " + std::to_string(cfg.lambda_bs));
    }
    return {std::clamp(cp, 0.0, 1.0), err, cfg.coverage_terms()};
}

/// Closed-form coverage approximation for a single-slope model: the signal
/// gain Gamma(N_a - N_U + 1, 1) is replaced by an exponential with the same
/// mean, which rescales the threshold to tau / (N_a - N_U + 1).
inline CoverageResult coverage_approx(const NetworkConfig& cfg, const PathlossModel& model) {
    cfg.validate();
    if (!model.single_slope()) {
        throw ContractViolation("coverage_approx: defined for single-slope pathloss only");
    }
    const double w = omega(cfg.n_users, model.final_exponent(), cfg.scaled_tau());
    const double dh2 = cfg.delta_h * cfg.delta_h;
    const double cp = std::exp(-std::numbers::pi * cfg.lambda_bs * dh2 * (w - 1.0)) / w;
    return {cp, 0.0, 1};
}

/// Closed-form lower bound on full-SDMA coverage (N_U = N_a), obtained by
/// keeping only serving distances in the final pathloss slope.
inline double coverage_lower_full(const NetworkConfig& cfg, const PathlossModel& model) {
    cfg.validate();
    if (cfg.n_users != cfg.n_antennas) {
        throw ContractViolation("coverage_lower_full: requires n_users == n_antennas");
    }
    const double w = omega(cfg.n_antennas, model.final_exponent(), cfg.tau);
    const double r = model.final_breakpoint();
    const double dh2 = cfg.delta_h * cfg.delta_h;
    return std::exp(-std::numbers::pi * cfg.lambda_bs * (w * (r * r + dh2) - dh2)) / w;
}

/// Decay rate of the full-SDMA lower bound in lambda (m^2).
inline double lower_full_decay_rate(const NetworkConfig& cfg, const PathlossModel& model) {
    const double w = omega(cfg.n_antennas, model.final_exponent(), cfg.tau);
    const double r = model.final_breakpoint();
    const double dh2 = cfg.delta_h * cfg.delta_h;
    return std::numbers::pi * (w * (r * r + dh2) - dh2);
}

/// Spatial throughput N_U lambda CP log2(1 + tau), bps/Hz/m^2.
inline double spatial_throughput(const NetworkConfig& cfg, double cp) {
    if (!(cp >= 0.0 && cp <= 1.0)) {
        throw DomainError("spatial_throughput: cp must lie in [0, 1] (cp = " + std::to_string(cp) +
                          ")");
    }
    return cfg.n_users * cfg.lambda_bs * cp * std::log2(1.0 + cfg.tau);
}

/// Density maximising the single-slope approximate throughput. Returns
/// nullopt when delta_h = 0: throughput then grows without bound.
inline std::optional<double> critical_density_closed(const NetworkConfig& cfg, double alpha0) {
    if (!(cfg.tau > 0.0)) {
        throw DomainError("critical_density_closed: tau must be positive");
    }
    if (cfg.n_users < 1 || cfg.n_users > cfg.n_antennas) {
        throw DomainError("critical_density_closed: need 1 <= n_users <= n_antennas");
    }
    if (!(cfg.delta_h > 0.0)) {
        return std::nullopt;
    }
    const double w = omega(cfg.n_users, alpha0, cfg.scaled_tau());
    return 1.0 / (std::numbers::pi * cfg.delta_h * cfg.delta_h * (w - 1.0));
}

inline double coverage(const NetworkConfig& cfg, const PathlossModel& model,
                       CoverageMethod method) {
    return method == CoverageMethod::exact ? coverage_exact(cfg, model).cp
                                           : coverage_approx(cfg, model).cp;
}

/// Numerical argmax of lambda -> ST(lambda) on [lo, hi] (m^-2): a log-spaced
/// scan brackets the peak, golden-section search refines it to rel_tol.
inline double critical_density_numeric(const NetworkConfig& cfg, const PathlossModel& model,
                                       double lambda_lo, double lambda_hi, CoverageMethod method,
                                       double rel_tol = analytic_limits::golden_rel_tol) {
    if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo)) {
        throw DomainError("critical_density_numeric: need 0 < lo < hi");
    }
    auto st_at_log = [&](double log_lambda) {
        const auto c = cfg.with_density(std::exp(log_lambda));
        return spatial_throughput(c, coverage(c, model, method));
    };

    const int n = analytic_limits::argmax_grid_points;
    const double a = std::log(lambda_lo);
    const double b = std::log(lambda_hi);
    std::vector<double> grid(n);
    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = a + (b - a) * i / (n - 1);
        values[i] = st_at_log(grid[i]);
    }
    const auto best = static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
    if (best == 0 || best == n - 1 || !(values[best] > values[0]) || !(values[best] > values[n - 1])) {
        throw NoInteriorMaximum("critical_density_numeric: throughput has no interior maximum in [" +
                                std::to_string(lambda_lo) + ", " + std::to_string(lambda_hi) +
                                "] m^-2");
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = grid[best - 1];
    double hi = grid[best + 1];
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = st_at_log(x1);
    double f2 = st_at_log(x2);
    const double width = std::log1p(rel_tol);
    while (hi - lo > width) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = st_at_log(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = st_at_log(x1);
        }
    }
    return std::exp(0.5 * (lo + hi));
}

/// Coverage and throughput at each density (m^-2), sorted ascending.
inline SweepResult make_sweep(const NetworkConfig& cfg, const PathlossModel& model,
                              std::vector<double> lambdas, CoverageMethod method) {
    std::sort(lambdas.begin(), lambdas.end());
    SweepResult out{scheme_of(cfg.n_antennas, cfg.n_users), cfg, {}};
    out.rows.reserve(lambdas.size());
    for (double lambda : lambdas) {
        const auto c = cfg.with_density(lambda);
        const double cp = coverage(c, model, method);
        out.rows.push_back({lambda, cp, spatial_throughput(c, cp)});
    }
    return out;
}

/// Least-squares fit of log CP = const - kappa lambda over the top density
/// decade of a sweep.
inline ScalingFit scaling_fit(const SweepResult& sweep) {
    if (sweep.rows.empty()) {
        throw DomainError("scaling_fit: empty sweep");
    }
    const double top = sweep.rows.back().lambda_bs;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& row : sweep.rows) {
        if (row.lambda_bs >= top / 10.0 * (1.0 - 1e-12)) {
            if (!(row.cp > 0.0)) {
                throw DomainError("scaling_fit: coverage must be positive on the fitted decade");
            }
            xs.push_back(row.lambda_bs);
            ys.push_back(std::log(row.cp));
        }
    }
    if (xs.size() < 3) {
        throw DomainError("scaling_fit: need at least 3 rows in the top density decade");
    }
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    const double kappa = -slope;
    if (!(kappa > 0.0)) {
        throw ScalingLawViolation("scaling_fit: fitted decay rate is not positive (kappa = " +
                                  std::to_string(kappa) + ")");
    }
    return {kappa, r2, xs.size()};
}

} // namespace udn
