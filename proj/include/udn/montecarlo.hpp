#pragma once

// Monte Carlo estimate of downlink coverage. Each trial drops a PPP of base
// stations on a disk around the typical user at the origin, associates the
// user with the nearest BS (smallest pathloss, since the pathloss is
// monotone) and draws zero-forcing fading gains from their marginal gamma
// laws.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "udn/errors.hpp"
#include "udn/network.hpp"
#include "udn/parallel.hpp"
#include "udn/pathloss.hpp"

namespace udn {

/// Too many trials had no interferer inside the simulation window.
class WindowTooSmall : public Error {
public:
    using Error::Error;
};

struct SimParams {
    double window_radius = 0.0; // m
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 0; // 0 selects the hardware concurrency
};

struct TrialOutcome {
    double serving_dist_3d = 0.0; // d0, m
    double sir = 0.0;
    bool covered = false;
    int resamples = 0; // degenerate snapshots discarded before this one
};

struct CpEstimate {
    double cp_hat = 0.0;
    double std_err = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t degenerate = 0;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

namespace mc_limits {
inline constexpr double max_degenerate_fraction = 0.01;
inline constexpr int max_resamples_per_trial = 1000;
} // namespace mc_limits

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// xoshiro256** (Blackman and Vigna). Several times faster than
/// std::mt19937_64, which dominates the cost of dense snapshots.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) {
        for (auto& word : state_) {
            seed += 0x9e3779b97f4a7c15ULL;
            word = splitmix64(seed);
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
};

/// Independent generator for trial `index`, derived from the master seed by
/// counter so results do not depend on how trials are scheduled.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed) ^ splitmix64(~index));
}

/// Window radius giving ~900 expected BSs and covering both the last pathloss
/// breakpoint and the antenna height difference with a wide margin.
///
/// With final exponent a > 2 the mean interference beyond radius W is
/// 2 pi lambda N_U P K W^(2-a) / (a-2); relative to the interference from
/// beyond d0 this is (d0 / W)^(a-2) for a single slope, which is below
/// 2.5e-5 at W = 200 delta_h (a = 4, d0 >= delta_h), and of order 1e-3 when
/// the 30 / sqrt(pi lambda) term dominates.
inline double default_window_radius(const NetworkConfig& cfg, const PathlossModel& model) {
    const double by_count = 30.0 / std::sqrt(std::numbers::pi * cfg.lambda_bs);
    return std::max({by_count, 20.0 * model.final_breakpoint(), 200.0 * cfg.delta_h});
}

/// Uniform on [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Homogeneous PPP of the given density on the disk of the given radius.
inline std::vector<Point2> sample_ppp(double density, double radius, Rng& rng) {
    if (!(density > 0.0) || !(radius > 0.0)) {
        throw DomainError("sample_ppp: density and radius must be positive");
    }
    std::poisson_distribution<long long> count(density * std::numbers::pi * radius * radius);
    const long long n = count(rng);
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        const double r = radius * std::sqrt(uniform01(rng));
        const double phi = 2.0 * std::numbers::pi * uniform01(rng);
        pts.push_back({r * std::cos(phi), r * std::sin(phi)});
    }
    return pts;
}

/// Gamma(shape, 1) variate as a sum of `shape` unit exponentials, computed as
/// -log of a product of uniforms.
inline double sample_gamma(int shape, Rng& rng) {
    if (shape < 1) {
        throw DomainError("sample_gamma: shape must be a positive integer");
    }
    double sum = 0.0;
    double prod = 1.0;
    for (int i = 0; i < shape; ++i) {
        prod *= 1.0 - uniform01(rng); // in (0, 1]
        if (prod < 1e-280) {
            sum -= std::log(prod);
            prod = 1.0;
        }
    }
    return sum - std::log(prod);
}

/// One SIR snapshot for the typical user. Only squared horizontal distances
/// enter the SIR, so BS positions are drawn radially; the layout is
/// rotation-invariant and angles would be discarded anyway.
inline TrialOutcome run_trial(const NetworkConfig& cfg, const PathlossModel& model,
                              const SimParams& sim, Rng& rng) {
    const double w2 = sim.window_radius * sim.window_radius;
    const double dh2 = cfg.delta_h * cfg.delta_h;
    const double mean_count = cfg.lambda_bs * std::numbers::pi * w2;
    const int signal_shape = cfg.n_antennas - cfg.n_users + 1;
    std::poisson_distribution<long long> count(mean_count);

    for (int attempt = 0; attempt <= mc_limits::max_resamples_per_trial; ++attempt) {
        const long long n = count(rng);
        if (n < 2) {
            continue; // no BS, or no interferer: resample
        }
        // Single pass: every BS gets an interferer gain, and the serving BS's
        // term is removed afterwards; its gain is redrawn from the signal law.
        double serving = std::numeric_limits<double>::infinity();
        double serving_term = 0.0;
        double total = 0.0;
        for (long long i = 0; i < n; ++i) {
            const double d2 = w2 * uniform01(rng) + dh2;
            const double term = sample_gamma(cfg.n_users, rng) * model.loss_at_squared(d2);
            total += term;
            if (d2 < serving) {
                serving = d2;
                serving_term = term;
            }
        }
        const double interference = cfg.power * (total - serving_term);
        const double signal = cfg.power * sample_gamma(signal_shape, rng) * model.loss_at_squared(serving);
        const double sir = signal / interference;
        return {std::sqrt(serving), sir, sir > cfg.tau, attempt};
    }
    throw WindowTooSmall("run_trial: no interferer in " +
                         std::to_string(mc_limits::max_resamples_per_trial) +
                         " consecutive snapshots; enlarge the window");
}

/// Empirical coverage over sim.trials independent snapshots.
inline CpEstimate estimate_cp(const NetworkConfig& cfg, const PathlossModel& model, SimParams sim) {
    cfg.validate();
    if (sim.trials < 1) {
        throw DomainError("estimate_cp: trials must be >= 1");
    }
    if (!(sim.window_radius > 0.0)) {
        sim.window_radius = default_window_radius(cfg, model);
    }
    const unsigned threads = sim.threads == 0 ? default_threads() : sim.threads;
    const std::uint64_t blocks = std::min<std::uint64_t>(threads, sim.trials);
    std::vector<std::uint64_t> covered(blocks, 0);
    std::vector<std::uint64_t> degenerate(blocks, 0);
    const std::uint64_t per_block = (sim.trials + blocks - 1) / blocks;

    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::uint64_t begin = b * per_block;
        const std::uint64_t end = std::min(sim.trials, begin + per_block);
        for (std::uint64_t i = begin; i < end; ++i) {
            auto rng = trial_rng(sim.seed, i);
            const auto outcome = run_trial(cfg, model, sim, rng);
            covered[b] += outcome.covered ? 1 : 0;
            degenerate[b] += static_cast<std::uint64_t>(outcome.resamples);
        }
    });

    CpEstimate est;
    est.trials = sim.trials;
    std::uint64_t hits = 0;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        hits += covered[b];
        est.degenerate += degenerate[b];
    }
    const auto n = static_cast<double>(sim.trials);
    if (static_cast<double>(est.degenerate) > mc_limits::max_degenerate_fraction * n) {
        throw WindowTooSmall("estimate_cp: " + std::to_string(est.degenerate) + " degenerate snapshots in " +
                             std::to_string(sim.trials) + " trials; window radius " +
                             std::to_string(sim.window_radius) + " m is too small");
    }
    if (est.degenerate > 0) {
        std::clog << "estimate_cp: resampled " << est.degenerate
                  << " snapshot(s) without an interferer\n";
    }
    est.cp_hat = static_cast<double>(hits) / n;
    est.std_err = std::sqrt(est.cp_hat * (1.0 - est.cp_hat) / n);
    return est;
}

} // namespace udn
