#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "udn/errors.hpp"

namespace udn {

/// Base class for rejected pathloss parameterisations.
class PathlossError : public DomainError {
public:
    using DomainError::DomainError;
};

class SlopeCountMismatch : public PathlossError {
public:
    using PathlossError::PathlossError;
};

class DecreasingExponents : public PathlossError {
public:
    using PathlossError::PathlossError;
};

class FinalExponentTooSmall : public PathlossError {
public:
    using PathlossError::PathlossError;
};

class NonIncreasingBreakpoints : public PathlossError {
public:
    using PathlossError::PathlossError;
};

/// Multi-slope pathloss l(d) = K_n d^(-alpha_n) for R_n <= d < R_(n+1),
/// with R_0 = 0 and R_N = infinity implicit. The constants K_n make l
/// continuous at every breakpoint.
class PathlossModel {
public:
    /// Validates the slopes and derives the continuity constants.
    static PathlossModel make(std::vector<double> exponents, std::vector<double> breakpoints) {
        if (exponents.empty() || exponents.size() != breakpoints.size() + 1) {
            throw SlopeCountMismatch("pathloss: expected " + std::to_string(breakpoints.size() + 1) +
                                     " exponents for " + std::to_string(breakpoints.size()) +
                                     " breakpoints, got " + std::to_string(exponents.size()));
        }
        for (std::size_t i = 1; i < exponents.size(); ++i) {
            if (exponents[i] < exponents[i - 1]) {
                throw DecreasingExponents("pathloss: exponents must be non-decreasing (alpha_" +
                                          std::to_string(i) + " < alpha_" + std::to_string(i - 1) +
                                          ")");
            }
        }
        if (!(exponents.back() > 2.0)) {
            throw FinalExponentTooSmall("pathloss: final exponent must exceed 2 (got " +
                                        std::to_string(exponents.back()) + ")");
        }
        for (std::size_t i = 0; i < breakpoints.size(); ++i) {
            const bool positive = breakpoints[i] > 0.0 && std::isfinite(breakpoints[i]);
            if (!positive || (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))) {
                throw NonIncreasingBreakpoints(
                    "pathloss: breakpoints must be positive and strictly increasing");
            }
        }

        PathlossModel m;
        m.constants_.assign(exponents.size(), 1.0);
        for (std::size_t n = 1; n < exponents.size(); ++n) {
            m.constants_[n] =
                m.constants_[n - 1] * std::pow(breakpoints[n - 1], exponents[n] - exponents[n - 1]);
        }
        m.half_exponent_int_.resize(exponents.size());
        for (std::size_t n = 0; n < exponents.size(); ++n) {
            const double half = 0.5 * exponents[n];
            m.half_exponent_int_[n] = (std::floor(half) == half && half <= 8.0) ? static_cast<int>(half) : -1;
        }
        m.exponents_ = std::move(exponents);
        m.breakpoints_ = std::move(breakpoints);
        return m;
    }

    std::size_t slopes() const { return exponents_.size(); }
    bool single_slope() const { return exponents_.size() == 1; }

    std::span<const double> exponents() const { return exponents_; }
    std::span<const double> breakpoints() const { return breakpoints_; }
    std::span<const double> constants() const { return constants_; }

    double final_exponent() const { return exponents_.back(); }
    double final_constant() const { return constants_.back(); }
    /// R_(N-1): start of the final slope, 0 for a single-slope model.
    double final_breakpoint() const { return breakpoints_.empty() ? 0.0 : breakpoints_.back(); }

    /// Index n of the slope with R_n <= d < R_(n+1).
    std::size_t segment_of(double d) const {
        std::size_t n = 0;
        while (n < breakpoints_.size() && d >= breakpoints_[n]) {
            ++n;
        }
        return n;
    }

    double loss_at(double d) const {
        if (!(d > 0.0)) {
            throw DomainError("pathloss: distance must be positive (d = " + std::to_string(d) + ")");
        }
        const std::size_t n = segment_of(d);
        return constants_[n] * std::pow(d, -exponents_[n]);
    }

    /// Loss as a function of the squared distance; avoids the square root and
    /// uses repeated multiplication for even integer exponents. No validation.
    double loss_at_squared(double d2) const {
        std::size_t n = 0;
        while (n < breakpoints_.size() && d2 >= breakpoints_[n] * breakpoints_[n]) {
            ++n;
        }
        const int k = half_exponent_int_[n];
        if (k >= 0) {
            double p = 1.0;
            for (int i = 0; i < k; ++i) {
                p *= d2;
            }
            return constants_[n] / p;
        }
        return constants_[n] * std::pow(d2, -0.5 * exponents_[n]);
    }

private:
    PathlossModel() = default;

    std::vector<double> exponents_;
    std::vector<double> breakpoints_;
    std::vector<double> constants_;
    std::vector<int> half_exponent_int_;
};

} // namespace udn
