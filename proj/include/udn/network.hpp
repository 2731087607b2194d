#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "udn/errors.hpp"

namespace udn {

/// Deployment and radio parameters of the downlink small-cell network.
/// All quantities are in linear SI units: BS per m^2, watts, linear SIR.
struct NetworkConfig {
    double lambda_bs = 1e-3;  // BS density, m^-2
    double power = 0.2;       // transmit power, W
    double tau = 10.0;        // SIR decoding threshold, linear
    double delta_h = 2.0;     // antenna height difference, m
    int n_antennas = 1;       // N_a
    int n_users = 1;          // N_U, users served per cell
    // User density. Cells are assumed saturated, so this is informational only.
    std::optional<double> lambda_users;

    /// Number of Laplace-derivative terms in the exact coverage sum.
    int coverage_terms() const { return n_antennas - n_users + 1; }
    /// Threshold seen by a single user after the zero-forcing array gain.
    double scaled_tau() const { return tau / static_cast<double>(n_antennas - n_users + 1); }

    void validate() const {
        if (n_antennas < 1) {
            throw DomainError("network: n_antennas must be >= 1");
        }
        if (n_users < 1 || n_users > n_antennas) {
            throw DomainError("network: need 1 <= n_users <= n_antennas (n_users = " +
                              std::to_string(n_users) + ", n_antennas = " +
                              std::to_string(n_antennas) + ")");
        }
        if (!(lambda_bs > 0.0) || !std::isfinite(lambda_bs)) {
            throw DomainError("network: lambda_bs must be positive");
        }
        if (!(tau > 0.0) || !std::isfinite(tau)) {
            throw DomainError("network: tau must be positive");
        }
        if (!(power > 0.0) || !std::isfinite(power)) {
            throw DomainError("network: power must be positive");
        }
        if (!(delta_h >= 0.0) || !std::isfinite(delta_h)) {
            throw DomainError("network: delta_h must be non-negative");
        }
    }

    NetworkConfig with_density(double lambda) const {
        NetworkConfig c = *this;
        c.lambda_bs = lambda;
        return c;
    }
    NetworkConfig with_users(int users) const {
        NetworkConfig c = *this;
        c.n_users = users;
        return c;
    }
};

enum class Scheme { su_bf, sdma, full_sdma };

inline Scheme scheme_of(int n_antennas, int n_users) {
    if (n_users == 1) {
        return Scheme::su_bf;
    }
    return n_users == n_antennas ? Scheme::full_sdma : Scheme::sdma;
}

inline std::string scheme_label(Scheme s) {
    switch (s) {
    case Scheme::su_bf:
        return "SU-BF";
    case Scheme::sdma:
        return "SDMA";
    case Scheme::full_sdma:
        return "full-SDMA";
    }
    return "?";
}

namespace units {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline constexpr double m2_per_km2 = 1e6;
inline double per_km2_to_per_m2(double v) { return v / m2_per_km2; }
inline double per_m2_to_per_km2(double v) { return v * m2_per_km2; }

} // namespace units

} // namespace udn
