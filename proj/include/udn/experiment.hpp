#pragma once

// Experiment orchestration behind the command-line tool: density sweeps,
// scheme comparisons and the self-check report.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "udn/analytic.hpp"
#include "udn/config.hpp"
#include "udn/montecarlo.hpp"
#include "udn/parallel.hpp"
#include "udn/specfun.hpp"

namespace udn {

/// A numeric failure at one sweep point.
class PointFailure : public Error {
public:
    PointFailure(double lambda_per_km2, const std::string& what)
        : Error("numeric failure at lambda = " + format_number(lambda_per_km2) + " km^-2: " + what),
          lambda_per_km2_(lambda_per_km2) {}

    double lambda_per_km2() const { return lambda_per_km2_; }

    static std::string format_number(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.15g", v);
        return buf;
    }

private:
    double lambda_per_km2_;
};

struct CsvRow {
    double lambda_per_km2 = 0.0;
    Scheme scheme = Scheme::su_bf;
    int n_antennas = 1;
    int n_users = 1;
    double cp_analytic = 0.0;
    std::optional<double> cp_approx;
    std::optional<double> cp_mc;
    std::optional<double> mc_stderr;
    double st_analytic = 0.0; // bps/Hz/km^2
};

inline constexpr const char* csv_header =
    "lambda_per_km2,scheme,n_antennas,n_users,cp_analytic,cp_approx,cp_mc,mc_stderr,st_analytic";

inline std::string format_csv_number(double v) { return PointFailure::format_number(v); }

inline void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
    auto opt = [](const std::optional<double>& v) { return v ? format_csv_number(*v) : std::string(); };
    out << csv_header << '\n';
    for (const auto& r : rows) {
        out << format_csv_number(r.lambda_per_km2) << ',' << scheme_label(r.scheme) << ','
            << r.n_antennas << ',' << r.n_users << ',' << format_csv_number(r.cp_analytic) << ','
            << opt(r.cp_approx) << ',' << opt(r.cp_mc) << ',' << opt(r.mc_stderr) << ','
            << format_csv_number(r.st_analytic) << '\n';
    }
}

inline SimParams sim_params(const ExperimentConfig& cfg, std::size_t point_index) {
    SimParams sim;
    sim.trials = cfg.trials;
    sim.seed = cfg.seed + point_index;
    sim.window_radius = cfg.window_radius_m.value_or(0.0);
    sim.threads = 1; // sweep points already run concurrently
    return sim;
}

/// One row per (density, served-user count), sorted by density then N_U.
inline std::vector<CsvRow> run_sweep(const ExperimentConfig& cfg) {
    const auto model = cfg.pathloss();
    const auto densities = cfg.densities_per_km2();
    struct Job {
        std::size_t point;
        int users;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < densities.size(); ++i) {
        for (int u : cfg.n_users) {
            jobs.push_back({i, u});
        }
    }
    std::vector<CsvRow> rows(jobs.size());
    const unsigned threads = cfg.threads == 0 ? default_threads() : cfg.threads;

    parallel_for(jobs.size(), threads, [&](std::size_t j) {
        const double lambda_km2 = densities[jobs[j].point];
        try {
            const auto net = cfg.network(jobs[j].users, units::per_km2_to_per_m2(lambda_km2));
            CsvRow row;
            row.lambda_per_km2 = lambda_km2;
            row.scheme = scheme_of(net.n_antennas, net.n_users);
            row.n_antennas = net.n_antennas;
            row.n_users = net.n_users;
            row.cp_analytic = coverage_exact(net, model).cp;
            if (model.single_slope()) {
                row.cp_approx = coverage_approx(net, model).cp;
            }
            if (cfg.trials > 0) {
                const auto est = estimate_cp(net, model, sim_params(cfg, jobs[j].point));
                row.cp_mc = est.cp_hat;
                row.mc_stderr = est.std_err;
            }
            row.st_analytic = net.n_users * lambda_km2 * row.cp_analytic * std::log2(1.0 + net.tau);
            rows[j] = row;
        } catch (const Error& e) {
            throw PointFailure(lambda_km2, e.what());
        }
    });

    std::stable_sort(rows.begin(), rows.end(), [](const CsvRow& a, const CsvRow& b) {
        if (a.lambda_per_km2 != b.lambda_per_km2) {
            return a.lambda_per_km2 < b.lambda_per_km2;
        }
        return a.n_users < b.n_users;
    });
    return rows;
}

struct CriticalDensitySummary {
    Scheme scheme = Scheme::su_bf;
    int n_users = 1;
    std::optional<double> closed_per_km2; // single slope with delta_h > 0 only
    std::optional<double> numeric_per_km2;
    std::string note;
};

/// Critical densities per served-user count. The numeric search extends two
/// decades beyond each end of the sweep range.
inline std::vector<CriticalDensitySummary> critical_density_summary(const ExperimentConfig& cfg,
                                                                    CoverageMethod method) {
    const auto model = cfg.pathloss();
    std::vector<CriticalDensitySummary> out(cfg.n_users.size());
    const unsigned threads = cfg.threads == 0 ? default_threads() : cfg.threads;
    parallel_for(cfg.n_users.size(), threads, [&](std::size_t i) {
        const int u = cfg.n_users[i];
        const auto net = cfg.network(u, units::per_km2_to_per_m2(cfg.lambda_min_per_km2));
        CriticalDensitySummary s;
        s.n_users = u;
        s.scheme = scheme_of(net.n_antennas, u);
        if (model.single_slope()) {
            if (auto c = critical_density_closed(net, model.final_exponent())) {
                s.closed_per_km2 = units::per_m2_to_per_km2(*c);
            }
        }
        try {
            s.numeric_per_km2 = units::per_m2_to_per_km2(critical_density_numeric(
                net, model, units::per_km2_to_per_m2(cfg.lambda_min_per_km2) / 100.0,
                units::per_km2_to_per_m2(cfg.lambda_max_per_km2) * 100.0, method));
        } catch (const NoInteriorMaximum&) {
            s.note = "no interior maximum in search range";
        }
        out[i] = s;
    });
    return out;
}

inline void write_summary(std::ostream& out, const std::vector<CriticalDensitySummary>& rows) {
    out << "critical density (BS/km^2)\n";
    out << "scheme,n_users,closed_form,numeric\n";
    for (const auto& s : rows) {
        out << scheme_label(s.scheme) << ',' << s.n_users << ','
            << (s.closed_per_km2 ? format_csv_number(*s.closed_per_km2) : std::string("n/a")) << ','
            << (s.numeric_per_km2 ? format_csv_number(*s.numeric_per_km2) : "n/a (" + s.note + ")")
            << '\n';
    }
}

// ---------------------------------------------------------------------------
// Self-check report

enum class CheckStatus { pass, fail, skipped };

struct Check {
    std::string name;
    CheckStatus status = CheckStatus::pass;
    std::string observed;
    std::string expected;
    std::string tolerance;
};

struct ValidationReport {
    std::vector<Check> checks;

    bool passed() const {
        return std::none_of(checks.begin(), checks.end(),
                            [](const Check& c) { return c.status == CheckStatus::fail; });
    }
};

inline void write_report(std::ostream& out, const ValidationReport& report) {
    for (const auto& c : report.checks) {
        const char* tag = c.status == CheckStatus::pass   ? "PASS"
                          : c.status == CheckStatus::fail ? "FAIL"
                                                          : "SKIPPED";
        out << '[' << tag << "] " << c.name << ": observed " << c.observed << ", expected "
            << c.expected << ", tolerance " << c.tolerance << '\n';
    }
    const auto failed = std::count_if(report.checks.begin(), report.checks.end(),
                                      [](const Check& c) { return c.status == CheckStatus::fail; });
    out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
}

/// Standard error used to compare an MC estimate with a reference value:
/// the binomial error of the estimate, floored by the binomial error of the
/// reference so that an all-miss (or all-hit) estimate does not claim zero
/// uncertainty.
inline double agreement_sigma(const CpEstimate& est, double reference) {
    const double p = std::clamp(reference, 0.0, 1.0);
    const double null_sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(est.trials));
    return std::max(est.std_err, null_sigma);
}

/// Smallest trial count whose 3-sigma band at cp = 1/2 is below 0.05.
inline constexpr std::uint64_t min_resolving_trials = 900;

inline ValidationReport validate(const ExperimentConfig& cfg) {
    ValidationReport report;
    const auto model = cfg.pathloss();
    const auto base = cfg.network(cfg.n_users.front(), units::per_km2_to_per_m2(cfg.lambda_min_per_km2));
    const bool sspm = model.single_slope();
    const bool has_ahd = cfg.delta_h_m > 0.0;
    auto num = [](double v) { return format_csv_number(v); };
    auto add = [&](std::string name, bool ok, std::string observed, std::string expected,
                   std::string tol) {
        report.checks.push_back({std::move(name), ok ? CheckStatus::pass : CheckStatus::fail,
                                 std::move(observed), std::move(expected), std::move(tol)});
    };
    auto skip = [&](std::string name, std::string why) {
        report.checks.push_back({std::move(name), CheckStatus::skipped, why, "-", "-"});
    };

    {
        double worst = 0.0;
        for (double t : {0.1, 1.0, 10.0, 100.0}) {
            const double ref = 1.0 + std::sqrt(t) * std::atan(std::sqrt(t));
            worst = std::max(worst, std::abs(omega(1, 4, t) / ref - 1.0));
        }
        add("omega_arctan_closed_form", worst <= 1e-10, num(worst) + " max rel err", "0", "1e-10");
    }
    {
        const double alpha = model.final_exponent();
        double prev = 0.0;
        bool increasing = true;
        for (int n = 1; n <= 32; ++n) {
            const double v = omega(n, alpha, base.tau);
            increasing = increasing && (n == 1 || v > prev);
            prev = v;
        }
        add("hyp2f1_increasing_in_first_parameter", increasing,
            increasing ? "strictly increasing" : "not increasing", "strictly increasing over N=1..32",
            "exact");
    }
    {
        double worst = 0.0;
        const auto k = model.constants();
        const auto a = model.exponents();
        for (std::size_t n = 1; n < model.slopes(); ++n) {
            const double r = model.breakpoints()[n - 1];
            const double left = k[n - 1] * std::pow(r, -a[n - 1]);
            const double right = k[n] * std::pow(r, -a[n]);
            worst = std::max(worst, std::abs(left / right - 1.0));
        }
        add("pathloss_continuity", worst <= 1e-12, num(worst), "0", "1e-12");
    }

    const auto densities = cfg.densities_per_km2();
    std::vector<double> exact(densities.size());
    for (std::size_t i = 0; i < densities.size(); ++i) {
        exact[i] = coverage_exact(base.with_density(units::per_km2_to_per_m2(densities[i])), model).cp;
    }
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < densities.size(); ++i) {
            const auto net = base.with_density(units::per_km2_to_per_m2(densities[i]));
            const double st_km2 = units::per_m2_to_per_km2(spatial_throughput(net, exact[i]));
            const double again = base.n_users * densities[i] * exact[i] * std::log2(1.0 + base.tau);
            if (again != 0.0) {
                worst = std::max(worst, std::abs(st_km2 / again - 1.0));
            }
        }
        add("throughput_recomputable", worst <= 1e-12, num(worst), "0", "1e-12");
    }

    if (sspm) {
        double worst = 0.0;
        auto single = cfg.network(1, 0.0);
        single.n_antennas = 1;
        for (double d : densities) {
            const auto net = single.with_density(units::per_km2_to_per_m2(d));
            worst = std::max(worst, std::abs(coverage_exact(net, model).cp - coverage_approx(net, model).cp));
        }
        add("approximation_exact_for_single_antenna", worst <= 1e-6, num(worst), "0", "1e-6");
    } else {
        skip("approximation_exact_for_single_antenna", "multi-slope pathloss");
    }

    if (sspm && has_ahd) {
        const double alpha = model.final_exponent();
        double worst = 0.0;
        for (int u : cfg.n_users) {
            const auto net = cfg.network(u, 1.0);
            const double closed = *critical_density_closed(net, alpha);
            const double numeric = critical_density_numeric(net, model, closed / 100.0, closed * 100.0,
                                                            CoverageMethod::approx);
            worst = std::max(worst, std::abs(numeric / closed - 1.0));
        }
        add("critical_density_closed_vs_numeric", worst <= 0.01, num(worst) + " max rel diff", "0",
            "0.01");

        bool decreasing = true;
        double prev = 0.0;
        for (int na : {1, 2, 4, 8, 16}) {
            auto net = cfg.network(1, 1.0);
            net.n_antennas = na;
            net.n_users = na;
            const double c = *critical_density_closed(net, alpha);
            decreasing = decreasing && (na == 1 || c < prev);
            prev = c;
        }
        add("full_sdma_critical_density_decreasing_in_antennas", decreasing,
            decreasing ? "strictly decreasing" : "not decreasing", "strictly decreasing", "exact");

        int best_users = 0;
        double best = -1.0;
        bool unique = true;
        for (int u = 1; u <= cfg.n_antennas; ++u) {
            const double c = *critical_density_closed(cfg.network(u, 1.0), alpha);
            if (c > best) {
                best = c;
                best_users = u;
                unique = true;
            } else if (c == best) {
                unique = false;
            }
        }
        add("su_bf_maximises_critical_density", best_users == 1 && unique,
            "argmax N_U = " + std::to_string(best_users), "N_U = 1", "exact");
    } else {
        const char* why = sspm ? "delta_h = 0: no finite critical density" : "multi-slope pathloss";
        skip("critical_density_closed_vs_numeric", why);
        skip("full_sdma_critical_density_decreasing_in_antennas", why);
        skip("su_bf_maximises_critical_density", why);
    }

    if (cfg.trials == 0) {
        skip("analytic_vs_monte_carlo", "mc.trials = 0");
    } else if (cfg.trials < min_resolving_trials) {
        skip("analytic_vs_monte_carlo", "mc.trials = " + std::to_string(cfg.trials) +
                                            " below the 3-sigma resolution floor of " +
                                            std::to_string(min_resolving_trials));
    } else {
        double worst = 0.0;
        for (std::size_t i = 0; i < densities.size(); ++i) {
            const auto net = base.with_density(units::per_km2_to_per_m2(densities[i]));
            auto sim = sim_params(cfg, i);
            sim.threads = cfg.threads;
            const auto est = estimate_cp(net, model, sim);
            worst = std::max(worst, std::abs(est.cp_hat - exact[i]) / agreement_sigma(est, exact[i]));
        }
        add("analytic_vs_monte_carlo", worst <= 3.0, num(worst) + " sigma (worst point)", "0",
            "3 sigma");
    }

    for (const auto& [key, expected] : cfg.golden) {
        std::optional<double> observed;
        if (key == "critical_density_per_km2") {
            if (sspm) {
                if (auto c = critical_density_closed(base, model.final_exponent())) {
                    observed = units::per_m2_to_per_km2(*c);
                }
            }
        } else if (key == "cp_exact_at_lambda_min") {
            observed = exact.front();
        }
        const std::string name = "golden_" + key;
        if (!observed) {
            add(name, false, "undefined for this configuration", num(expected), num(cfg.golden_rel_tol));
            continue;
        }
        const double rel = std::abs(*observed / expected - 1.0);
        add(name, rel <= cfg.golden_rel_tol, num(*observed), num(expected),
            num(cfg.golden_rel_tol) + " rel");
    }
    return report;
}

} // namespace udn
