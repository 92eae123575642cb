// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte Carlo sweeps over one scenario axis. Every trial draws one
// channel realization and solves all requested modes on it.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "hrris/channel.hpp"
#include "hrris/optimizer.hpp"
#include "hrris/rng.hpp"
#include "hrris/scenario.hpp"

namespace hrris {

enum class Axis { x_u, n_elements, a_active, f_edge, f_local, e_antennas, pa_max_dbm };

inline constexpr Axis kAllAxes[] = {Axis::x_u,     Axis::n_elements, Axis::a_active,  Axis::f_edge,
                                    Axis::f_local, Axis::e_antennas, Axis::pa_max_dbm};

inline std::string_view to_string(Axis a)
{
    switch (a) {
    case Axis::x_u: return "x_u";
    case Axis::n_elements: return "n_elements";
    case Axis::a_active: return "a_active";
    case Axis::f_edge: return "f_edge";
    case Axis::f_local: return "f_local";
    case Axis::e_antennas: return "e_antennas";
    case Axis::pa_max_dbm: return "pa_max_dbm";
    }
    return "?";
}

inline Axis parse_axis(std::string_view s)
{
    for (Axis a : kAllAxes)
        if (s == to_string(a))
            return a;
    throw ConfigError("sweep", "unknown axis '" + std::string(s) + "'");
}

// Solver modes plus the all-local reference.
enum class RunMode { ris_random, ris_optimized, hrris_fixed, hrris_dynamic, local_only };

inline constexpr RunMode kAllRunModes[] = {RunMode::local_only, RunMode::ris_random, RunMode::ris_optimized,
                                           RunMode::hrris_fixed, RunMode::hrris_dynamic};

inline std::string_view to_string(RunMode m)
{
    switch (m) {
    case RunMode::ris_random: return "ris_random";
    case RunMode::ris_optimized: return "ris_optimized";
    case RunMode::hrris_fixed: return "hrris_fixed";
    case RunMode::hrris_dynamic: return "hrris_dynamic";
    case RunMode::local_only: return "local_only";
    }
    return "?";
}

inline RunMode parse_run_mode(std::string_view s)
{
    for (RunMode m : kAllRunModes)
        if (s == to_string(m))
            return m;
    throw ConfigError("modes", "unknown mode '" + std::string(s) + "'");
}

inline Mode solver_mode(RunMode m)
{
    switch (m) {
    case RunMode::ris_random: return Mode::ris_random;
    case RunMode::ris_optimized: return Mode::ris_optimized;
    case RunMode::hrris_fixed: return Mode::hrris_fixed;
    case RunMode::hrris_dynamic: return Mode::hrris_dynamic;
    case RunMode::local_only: break;
    }
    throw std::invalid_argument("local_only has no solver mode");
}

struct SweepSpec {
    Axis axis = Axis::x_u;
    std::vector<double> values;
    std::size_t trials = 200;
    std::uint64_t base_seed = 0;
    std::vector<RunMode> modes{std::begin(kAllRunModes), std::end(kAllRunModes)};
    // Trial t draws the same random numbers at every axis value (common
    // random numbers). When false, the seed also depends on the value index.
    bool paired_values = true;
};

inline void validate(const SweepSpec& spec)
{
    if (spec.values.empty())
        throw ConfigError("sweep", "no axis values");
    for (std::size_t i = 1; i < spec.values.size(); ++i)
        if (!(spec.values[i] > spec.values[i - 1]))
            throw ConfigError("sweep", "axis values must be strictly increasing");
    if (spec.trials == 0)
        throw ConfigError("trials", "must be at least 1");
    if (spec.modes.empty())
        throw ConfigError("modes", "no modes requested");
}

// start, start + step, ... up to stop (inclusive within rounding).
inline std::vector<double> axis_range(double start, double stop, double step)
{
    if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop) || stop < start)
        throw ConfigError("sweep", "expected start:stop:step with step > 0 and stop >= start");
    std::vector<double> out;
    const double slack = 1e-9 * step;
    for (std::size_t k = 0;; ++k) {
        const double v = start + static_cast<double>(k) * step;
        if (v > stop + slack)
            break;
        out.push_back(v);
        if (out.size() > 1'000'000)
            throw ConfigError("sweep", "too many axis values");
    }
    return out;
}

namespace detail {

inline std::size_t integral_axis_value(double v, Axis axis)
{
    if (!(v >= 0.0) || v != std::floor(v))
        throw ConfigError(std::string(to_string(axis)), "value " + format_double(v) + " is not a non-negative integer");
    return static_cast<std::size_t>(v);
}

} // namespace detail

// Base scenario with one axis overridden. Changing N recomputes the UPA shape;
// changing N or A resets the fixed active set to the lowest A indices.
inline Scenario apply_axis(Scenario s, Axis axis, double value)
{
    switch (axis) {
    case Axis::x_u: s.x_u_m = value; break;
    case Axis::n_elements:
        s.n_elements = detail::integral_axis_value(value, axis);
        s.upa_shape = squarest_shape(s.n_elements);
        s.fixed_active_set = default_active_set(s.a_active);
        break;
    case Axis::a_active:
        s.a_active = detail::integral_axis_value(value, axis);
        s.fixed_active_set = default_active_set(s.a_active);
        break;
    case Axis::f_edge: s.compute.edge_rate = value; break;
    case Axis::f_local: s.compute.local_rate = value; break;
    case Axis::e_antennas: s.e_antennas = detail::integral_axis_value(value, axis); break;
    case Axis::pa_max_dbm: s.p_active_max_dbm = value; break;
    }
    try {
        validate(s);
    } catch (const ConfigError& e) {
        throw ConfigError(e.field(), std::string("invalid scenario at ") + std::string(to_string(axis)) + "=" +
                                         detail::format_double(value) + ": " + e.what());
    }
    return s;
}

inline std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t value_index, std::size_t trial)
{
    return base_seed ^ splitmix64(splitmix64(static_cast<std::uint64_t>(value_index)) + static_cast<std::uint64_t>(trial));
}

inline std::uint64_t trial_seed(const SweepSpec& spec, std::size_t value_index, std::size_t trial)
{
    return trial_seed(spec.base_seed, spec.paired_values ? 0 : value_index, trial);
}

// All requested modes on one shared channel realization. Each solver mode
// restarts the phase-init stream, so all modes share the same random start.
inline std::map<RunMode, Solution> run_trial(const Scenario& s, std::uint64_t seed, std::span<const RunMode> modes,
                                             const SolverOptions& opt = {})
{
    std::map<RunMode, Solution> out;
    const ChannelSet cs = synthesize_channels(s, seed);
    for (RunMode m : modes) {
        if (m == RunMode::local_only) {
            out[m] = local_only_solution(s.compute);
            continue;
        }
        Scenario per_mode = s;
        per_mode.mode = solver_mode(m);
        Rng rng = substream(seed, Substream::phase_init);
        out[m] = run_alternating(per_mode, cs, rng, opt);
    }
    return out;
}

struct Record {
    Axis axis = Axis::x_u;
    double value = 0.0;
    RunMode mode = RunMode::local_only;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double latency_s = 0.0;
    double secrecy_rate_bps = 0.0;
    double rate_en_bps = 0.0;
    double leakage_bps = 0.0;
    std::int64_t ell_bits = 0;
    int iterations = 0;
    bool converged = false;
    double active_power_w = 0.0;
    bool budget_exceeded = false;
};

inline Record make_record(Axis axis, double value, RunMode mode, std::size_t trial, std::uint64_t seed,
                          const Solution& sol)
{
    return {axis,         value,       mode,           trial,          seed,
            sol.latency,  sol.secrecy_rate, sol.rate_en, sol.leakage_bound, sol.offload_bits,
            sol.iterations, sol.converged, sol.active_power, sol.budget_exceeded};
}

struct ResultTable {
    SweepSpec spec;
    Scenario base;
    std::vector<Record> records; // ordered by (value, mode, trial)
};

// Trials are spread across `workers` threads; the table layout depends only
// on (value, mode, trial), never on completion order.
inline ResultTable run_sweep(const SweepSpec& spec, const Scenario& base, unsigned workers = 0,
                             const SolverOptions& opt = {})
{
    validate(spec);
    std::vector<Scenario> scenarios;
    scenarios.reserve(spec.values.size());
    for (double v : spec.values)
        scenarios.push_back(apply_axis(base, spec.axis, v));

    ResultTable table{spec, base, {}};
    const std::size_t n_modes = spec.modes.size();
    table.records.resize(spec.values.size() * n_modes * spec.trials);

    const std::size_t n_items = spec.values.size() * spec.trials;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (std::size_t item = next++; item < n_items; item = next++) {
            const std::size_t i = item / spec.trials;
            const std::size_t t = item % spec.trials;
            try {
                const auto seed = trial_seed(spec, i, t);
                const auto sols = run_trial(scenarios[i], seed, spec.modes, opt);
                for (std::size_t m = 0; m < n_modes; ++m) {
                    const RunMode mode = spec.modes[m];
                    table.records[(i * n_modes + m) * spec.trials + t] =
                        make_record(spec.axis, spec.values[i], mode, t, seed, sols.at(mode));
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = n_items;
            }
        }
    };

    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_items));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < workers; ++k)
            pool.emplace_back(work);
    }
    if (failure)
        std::rethrow_exception(failure);
    return table;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct CellSummary {
    double value = 0.0;
    RunMode mode = RunMode::local_only;
    std::size_t count = 0;
    double mean_latency = 0.0;
    double median_latency = 0.0;
    double mean_secrecy_rate = 0.0;
};

inline std::vector<CellSummary> summarize(const ResultTable& table)
{
    std::vector<CellSummary> out;
    const auto& spec = table.spec;
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        for (std::size_t m = 0; m < spec.modes.size(); ++m) {
            CellSummary cell{spec.values[i], spec.modes[m], 0, 0.0, 0.0, 0.0};
            std::vector<double> lat;
            for (const auto& r : table.records) {
                if (r.value == spec.values[i] && r.mode == spec.modes[m]) {
                    lat.push_back(r.latency_s);
                    cell.mean_secrecy_rate += r.secrecy_rate_bps;
                }
            }
            cell.count = lat.size();
            if (!lat.empty()) {
                for (double x : lat)
                    cell.mean_latency += x;
                cell.mean_latency /= static_cast<double>(lat.size());
                cell.mean_secrecy_rate /= static_cast<double>(lat.size());
                std::sort(lat.begin(), lat.end());
                const auto h = lat.size() / 2;
                cell.median_latency = lat.size() % 2 ? lat[h] : 0.5 * (lat[h - 1] + lat[h]);
            }
            out.push_back(cell);
        }
    }
    return out;
}

inline double mean_latency(const std::vector<CellSummary>& cells, double value, RunMode mode)
{
    for (const auto& c : cells)
        if (c.value == value && c.mode == mode)
            return c.mean_latency;
    throw std::out_of_range("no summary cell for requested (value, mode)");
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kCsvHeader =
    "axis,value,mode,trial,seed,latency_s,secrecy_rate_bps,rate_en_bps,leakage_bps,ell_bits,iterations,"
    "converged,active_power_w,budget_exceeded";

inline void write_csv(const ResultTable& table, std::ostream& os, bool deterministic = false)
{
    using detail::format_double;
    const auto& spec = table.spec;
    os << "# hrris sweep results\n";
    if (!deterministic) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm utc{};
        gmtime_r(&now, &utc);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
        os << "# generated=" << stamp << '\n';
    }
    os << "# sweep.axis=" << to_string(spec.axis) << '\n';
    os << "# sweep.values=";
    for (std::size_t i = 0; i < spec.values.size(); ++i)
        os << (i ? "," : "") << format_double(spec.values[i]);
    os << '\n' << "# sweep.trials=" << spec.trials << '\n' << "# sweep.base_seed=" << spec.base_seed << '\n';
    os << "# sweep.paired_values=" << (spec.paired_values ? "true" : "false") << '\n';
    os << "# sweep.modes=";
    for (std::size_t i = 0; i < spec.modes.size(); ++i)
        os << (i ? "," : "") << to_string(spec.modes[i]);
    os << '\n';

    const std::string cfg = to_config_text(table.base);
    std::size_t start = 0;
    while (start < cfg.size()) {
        const auto end = cfg.find('\n', start);
        os << "# scenario." << cfg.substr(start, end - start) << '\n';
        start = end == std::string::npos ? cfg.size() : end + 1;
    }

    os << kCsvHeader << '\n';
    for (const auto& r : table.records) {
        os << to_string(r.axis) << ',' << format_double(r.value) << ',' << to_string(r.mode) << ',' << r.trial << ','
           << r.seed << ',' << format_double(r.latency_s) << ',' << format_double(r.secrecy_rate_bps) << ','
           << format_double(r.rate_en_bps) << ',' << format_double(r.leakage_bps) << ',' << r.ell_bits << ','
           << r.iterations << ',' << (r.converged ? "true" : "false") << ',' << format_double(r.active_power_w)
           << ',' << (r.budget_exceeded ? "true" : "false") << '\n';
    }
}

inline void write_csv(const ResultTable& table, const std::filesystem::path& path, bool deterministic = false)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw IoError("cannot open '" + path.string() + "' for writing");
    write_csv(table, os, deterministic);
    os.flush();
    if (!os)
        throw IoError("write to '" + path.string() + "' failed");
}

} // namespace hrris
