#pragma once

// Experiment configuration: a flat key = value text format grouped by
// [section] headers. '#' starts a comment. Lists are comma separated.
//
//   [network]   power_dbm, tau_db, delta_h_m, n_antennas, n_users (list),
//               lambda_users_per_km2 (optional, informational)
//   [pathloss]  exponents (list), breakpoints_m (list, may be empty)
//   [sweep]     lambda_min_per_km2, lambda_max_per_km2, points, log_spaced
//   [mc]        trials, seed, window_radius_m (optional), threads (optional)
//   [output]    path
//   [golden]    critical_density_per_km2, cp_exact_at_lambda_min, rel_tol
//
// Densities are per km^2 and power/threshold in dBm/dB here; conversion to
// the library's linear SI units happens in this file only.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "udn/errors.hpp"
#include "udn/network.hpp"
#include "udn/pathloss.hpp"

namespace udn {

/// Invalid or unreadable configuration, message prefixed with file:line.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct ExperimentConfig {
    std::string source = "<config>";

    // [network]
    double power_dbm = 23.0;
    double tau_db = 10.0;
    double delta_h_m = 2.0;
    int n_antennas = 16;
    std::vector<int> n_users{2};
    std::optional<double> lambda_users_per_km2;

    // [pathloss]
    std::vector<double> exponents{4.0};
    std::vector<double> breakpoints_m;

    // [sweep]
    double lambda_min_per_km2 = 1e2;
    double lambda_max_per_km2 = 1e5;
    int points = 13;
    bool log_spaced = true;

    // [mc]
    std::uint64_t trials = 0;
    std::uint64_t seed = 1;
    std::optional<double> window_radius_m;
    unsigned threads = 0;

    // [output]
    std::string output_path = "sweep.csv";

    // [golden]
    std::map<std::string, double> golden;
    double golden_rel_tol = 1e-6;

    PathlossModel pathloss() const { return PathlossModel::make(exponents, breakpoints_m); }

    /// Linear-unit network parameters for one scheme at density lambda (m^-2).
    NetworkConfig network(int users, double lambda_per_m2) const {
        NetworkConfig c;
        c.lambda_bs = lambda_per_m2;
        c.power = units::dbm_to_watts(power_dbm);
        c.tau = units::db_to_linear(tau_db);
        c.delta_h = delta_h_m;
        c.n_antennas = n_antennas;
        c.n_users = users;
        if (lambda_users_per_km2) {
            c.lambda_users = units::per_km2_to_per_m2(*lambda_users_per_km2);
        }
        return c;
    }

    std::vector<double> densities_per_km2() const {
        std::vector<double> out;
        if (points == 1) {
            out.push_back(lambda_min_per_km2);
            return out;
        }
        for (int i = 0; i < points; ++i) {
            const double f = static_cast<double>(i) / (points - 1);
            if (log_spaced) {
                out.push_back(lambda_min_per_km2 *
                              std::pow(lambda_max_per_km2 / lambda_min_per_km2, f));
            } else {
                out.push_back(lambda_min_per_km2 + f * (lambda_max_per_km2 - lambda_min_per_km2));
            }
        }
        return out;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class ConfigParser {
public:
    ConfigParser(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
    }

    double real(int line, std::string_view text) const {
        const std::string s(trim(text));
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
            fail(line, "expected a number, got '" + s + "'");
        }
        return v;
    }

    long long integer(int line, std::string_view text) const {
        const std::string s(trim(text));
        char* end = nullptr;
        errno = 0;
        const long long v = std::strtoll(s.c_str(), &end, 10);
        if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
            fail(line, "expected an integer, got '" + s + "'");
        }
        return v;
    }

    bool boolean(int line, std::string_view text) const {
        const auto s = trim(text);
        if (s == "true" || s == "yes" || s == "1") {
            return true;
        }
        if (s == "false" || s == "no" || s == "0") {
            return false;
        }
        fail(line, "expected true or false, got '" + std::string(s) + "'");
    }

    std::vector<std::string_view> split(std::string_view text) const {
        std::vector<std::string_view> items;
        text = trim(text);
        if (text.empty()) {
            return items;
        }
        std::size_t start = 0;
        while (true) {
            const auto comma = text.find(',', start);
            items.push_back(trim(text.substr(start, comma - start)));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        return items;
    }

    std::vector<double> reals(int line, std::string_view text) const {
        std::vector<double> out;
        for (auto item : split(text)) {
            out.push_back(real(line, item));
        }
        return out;
    }

private:
    std::string source_;
};

} // namespace detail

/// Parses configuration text; `source` names it in diagnostics.
inline ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>") {
    ExperimentConfig cfg;
    cfg.source = source;
    detail::ConfigParser p(source);
    std::map<std::string, int> seen; // "section.key" -> line

    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = raw;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) {
            s = s.substr(0, hash);
        }
        s = detail::trim(s);
        if (s.empty()) {
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']') {
                p.fail(line, "malformed section header");
            }
            section = std::string(detail::trim(s.substr(1, s.size() - 2)));
            static const char* known[] = {"network", "pathloss", "sweep", "mc", "output", "golden"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
                p.fail(line, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            p.fail(line, "expected 'key = value'");
        }
        if (section.empty()) {
            p.fail(line, "key outside of any section");
        }
        const std::string key(detail::trim(s.substr(0, eq)));
        const std::string_view value = detail::trim(s.substr(eq + 1));
        const std::string qualified = section + "." + key;
        if (seen.count(qualified)) {
            p.fail(line, "duplicate key '" + key + "' (first set on line " +
                             std::to_string(seen[qualified]) + ")");
        }
        seen[qualified] = line;

        if (qualified == "network.power_dbm") {
            cfg.power_dbm = p.real(line, value);
        } else if (qualified == "network.tau_db") {
            cfg.tau_db = p.real(line, value);
        } else if (qualified == "network.delta_h_m") {
            cfg.delta_h_m = p.real(line, value);
            if (cfg.delta_h_m < 0.0) {
                p.fail(line, "delta_h_m must be >= 0");
            }
        } else if (qualified == "network.n_antennas") {
            const auto v = p.integer(line, value);
            if (v < 1 || v > 64) {
                p.fail(line, "n_antennas must lie in [1, 64]");
            }
            cfg.n_antennas = static_cast<int>(v);
        } else if (qualified == "network.n_users") {
            cfg.n_users.clear();
            for (auto item : p.split(value)) {
                const auto v = p.integer(line, item);
                if (v < 1) {
                    p.fail(line, "n_users entries must be >= 1");
                }
                cfg.n_users.push_back(static_cast<int>(v));
            }
            if (cfg.n_users.empty()) {
                p.fail(line, "n_users must list at least one value");
            }
        } else if (qualified == "network.lambda_users_per_km2") {
            cfg.lambda_users_per_km2 = p.real(line, value);
        } else if (qualified == "pathloss.exponents") {
            cfg.exponents = p.reals(line, value);
        } else if (qualified == "pathloss.breakpoints_m") {
            cfg.breakpoints_m = p.reals(line, value);
        } else if (qualified == "sweep.lambda_min_per_km2") {
            cfg.lambda_min_per_km2 = p.real(line, value);
        } else if (qualified == "sweep.lambda_max_per_km2") {
            cfg.lambda_max_per_km2 = p.real(line, value);
        } else if (qualified == "sweep.points") {
            const auto v = p.integer(line, value);
            if (v < 1 || v > 100000) {
                p.fail(line, "points must lie in [1, 100000] (empty sweep)");
            }
            cfg.points = static_cast<int>(v);
        } else if (qualified == "sweep.log_spaced") {
            cfg.log_spaced = p.boolean(line, value);
        } else if (qualified == "mc.trials") {
            const auto v = p.integer(line, value);
            if (v < 0) {
                p.fail(line, "trials must be >= 0");
            }
            cfg.trials = static_cast<std::uint64_t>(v);
        } else if (qualified == "mc.seed") {
            const auto v = p.integer(line, value);
            if (v < 0) {
                p.fail(line, "seed must be >= 0");
            }
            cfg.seed = static_cast<std::uint64_t>(v);
        } else if (qualified == "mc.window_radius_m") {
            cfg.window_radius_m = p.real(line, value);
            if (!(*cfg.window_radius_m > 0.0)) {
                p.fail(line, "window_radius_m must be positive");
            }
        } else if (qualified == "mc.threads") {
            const auto v = p.integer(line, value);
            if (v < 0) {
                p.fail(line, "threads must be >= 0");
            }
            cfg.threads = static_cast<unsigned>(v);
        } else if (qualified == "output.path") {
            cfg.output_path = std::string(value);
        } else if (section == "golden") {
            if (key == "rel_tol") {
                cfg.golden_rel_tol = p.real(line, value);
            } else if (key == "critical_density_per_km2" || key == "cp_exact_at_lambda_min") {
                cfg.golden[key] = p.real(line, value);
            } else {
                p.fail(line, "unknown golden value '" + key + "'");
            }
        } else {
            p.fail(line, "unknown key '" + key + "' in [" + section + "]");
        }
    }

    auto line_of = [&](const std::string& k) { return seen.count(k) ? seen[k] : 0; };

    for (int u : cfg.n_users) {
        if (u > cfg.n_antennas) {
            p.fail(line_of("network.n_users"), "n_users entry " + std::to_string(u) +
                                                   " exceeds n_antennas = " +
                                                   std::to_string(cfg.n_antennas));
        }
    }
    try {
        (void)cfg.pathloss();
    } catch (const PathlossError& e) {
        p.fail(line_of("pathloss.exponents"), e.what());
    }
    if (!(cfg.lambda_min_per_km2 > 0.0)) {
        p.fail(line_of("sweep.lambda_min_per_km2"), "lambda_min_per_km2 must be positive");
    }
    if (cfg.points > 1 && !(cfg.lambda_max_per_km2 > cfg.lambda_min_per_km2)) {
        p.fail(line_of("sweep.lambda_max_per_km2"),
               "lambda_max_per_km2 must exceed lambda_min_per_km2 (empty sweep)");
    }
    if (!(units::db_to_linear(cfg.tau_db) > 0.0)) {
        p.fail(line_of("network.tau_db"), "tau_db gives a non-positive threshold");
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path + ": cannot open configuration file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

} // namespace udn
