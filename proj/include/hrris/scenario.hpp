// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration for the HRRIS-assisted secure offloading link:
// node geometry, radio constants, computing constants and surface layout.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace hrris {

// ---------------------------------------------------------------------------
// Units
// ---------------------------------------------------------------------------

struct Db {
    double value;
};

struct Dbm {
    double value;
};

inline double to_linear(Db x) { return std::pow(10.0, x.value / 10.0); }

// Watts.
inline double to_linear(Dbm x) { return std::pow(10.0, (x.value - 30.0) / 10.0); }

inline Db to_db(double ratio) { return Db{10.0 * std::log10(ratio)}; }

inline Dbm to_dbm(double watts) { return Dbm{10.0 * std::log10(watts) + 30.0}; }

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class Mode { ris_random, ris_optimized, hrris_fixed, hrris_dynamic };

inline bool is_hybrid(Mode m) { return m == Mode::hrris_fixed || m == Mode::hrris_dynamic; }

inline std::string_view to_string(Mode m)
{
    switch (m) {
    case Mode::ris_random: return "ris_random";
    case Mode::ris_optimized: return "ris_optimized";
    case Mode::hrris_fixed: return "hrris_fixed";
    case Mode::hrris_dynamic: return "hrris_dynamic";
    }
    return "?";
}

inline Mode parse_mode(std::string_view s)
{
    for (Mode m : {Mode::ris_random, Mode::ris_optimized, Mode::hrris_fixed, Mode::hrris_dynamic})
        if (s == to_string(m))
            return m;
    throw ConfigError("mode", "unknown mode '" + std::string(s) + "'");
}

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// One value per link, in the fixed order user-EN, user-HRRIS, user-EVE, HRRIS-EN.
struct PerLink {
    double user_en = 0.0;
    double user_hrris = 0.0;
    double user_eve = 0.0;
    double hrris_en = 0.0;
};

struct UpaShape {
    std::size_t rows = 1;
    std::size_t cols = 1;
};

struct ComputeParams {
    std::int64_t total_bits = 300'000;  // L
    std::int64_t cycles_per_bit = 750;  // nu
    double local_rate = 5e8;            // f^l, cycles/s
    double edge_rate = 20e9;            // f^e, cycles/s

    double local_only_latency() const
    {
        return static_cast<double>(total_bits) * static_cast<double>(cycles_per_bit) / local_rate;
    }
};

// Paths shorter than this are clamped before the path-loss evaluation.
inline constexpr double kMinLinkDistance = 0.5;

struct Scenario {
    std::size_t m_antennas = 5;
    std::size_t e_antennas = 1;
    std::size_t n_elements = 50;
    std::size_t a_active = 1;
    Mode mode = Mode::hrris_fixed;
    // Zero-based element indices, ascending. Written one-based in config text.
    std::vector<std::size_t> fixed_active_set{0};

    double p_total_dbm = 30.0;
    double p_active_max_dbm = 0.0;
    double noise_power_dbm = -80.0;
    double eve_noise_power_dbm = -80.0;
    double bandwidth_hz = 1e6;
    double csi_error_bound = 0.1;

    double x_h_m = 50.0;
    double x_u_m = 45.0;
    double y_u_m = 2.0;
    double x_eve_m = 30.0;
    double y_eve_m = 9.0;

    double pathloss_ref_db = -30.0;
    PerLink pathloss_exponents{3.5, 2.2, 2.8, 2.2};
    PerLink rician_factors{0.0, 1.0, 0.0, 100.0};
    UpaShape upa_shape{5, 10};
    ComputeParams compute{};

    Point en() const { return {0.0, 0.0}; }
    Point surface() const { return {x_h_m, 0.0}; }
    Point user() const { return {x_u_m, y_u_m}; }
    Point eve() const { return {x_eve_m, y_eve_m}; }

    double noise_w() const { return to_linear(Dbm{noise_power_dbm}); }
    double eve_noise_w() const { return to_linear(Dbm{eve_noise_power_dbm}); }
    double total_power_w() const { return to_linear(Dbm{p_total_dbm}); }

    // Amplifier budget spent by the surface; RIS variants carry no amplifier.
    double active_budget_w(Mode m) const { return is_hybrid(m) ? to_linear(Dbm{p_active_max_dbm}) : 0.0; }

    // Same total power for every scheme: P = P_tot - P_a^max for HRRIS modes.
    double user_power_w(Mode m) const { return total_power_w() - active_budget_w(m); }
};

inline std::vector<std::size_t> default_active_set(std::size_t a_active)
{
    std::vector<std::size_t> out(a_active);
    for (std::size_t i = 0; i < a_active; ++i)
        out[i] = i;
    return out;
}

// Factor pair (r, c) with r * c = n, r <= c, minimising c - r.
inline UpaShape squarest_shape(std::size_t n)
{
    if (n == 0)
        return {0, 0};
    std::size_t r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (r > 1 && n % r != 0)
        --r;
    if (r == 0)
        r = 1;
    return {r, n / r};
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline void validate(const Scenario& s)
{
    auto positive = [](double v, const char* field) {
        if (!(std::isfinite(v) && v > 0.0))
            throw ConfigError(field, "must be finite and strictly positive");
    };
    auto finite = [](double v, const char* field) {
        if (!std::isfinite(v))
            throw ConfigError(field, "must be finite");
    };

    if (s.m_antennas == 0)
        throw ConfigError("m_antennas", "must be at least 1");
    if (s.e_antennas == 0)
        throw ConfigError("e_antennas", "must be at least 1");
    if (s.a_active > s.n_elements)
        throw ConfigError("a_active", "exceeds n_elements");

    if (s.fixed_active_set.size() != s.a_active)
        throw ConfigError("fixed_active_set", "cardinality must equal a_active");
    for (std::size_t i = 0; i < s.fixed_active_set.size(); ++i) {
        if (s.fixed_active_set[i] >= s.n_elements)
            throw ConfigError("fixed_active_set", "index out of range 1..n_elements");
        if (i > 0 && s.fixed_active_set[i] <= s.fixed_active_set[i - 1])
            throw ConfigError("fixed_active_set", "indices must be distinct and ascending");
    }

    if (s.upa_shape.rows * s.upa_shape.cols != s.n_elements)
        throw ConfigError("upa_shape", "rows * cols must equal n_elements");

    for (auto [v, f] : {std::pair{s.p_total_dbm, "p_total_dbm"}, {s.p_active_max_dbm, "p_active_max_dbm"},
                        {s.noise_power_dbm, "noise_power_dbm"}, {s.eve_noise_power_dbm, "eve_noise_power_dbm"},
                        {s.pathloss_ref_db, "pathloss_ref_db"}, {s.x_u_m, "x_u_m"}, {s.y_u_m, "y_u_m"},
                        {s.x_eve_m, "x_eve_m"}, {s.y_eve_m, "y_eve_m"}})
        finite(v, f);
    positive(s.bandwidth_hz, "bandwidth_hz");
    positive(s.x_h_m, "x_h_m");
    if (!(std::isfinite(s.csi_error_bound) && s.csi_error_bound >= 0.0))
        throw ConfigError("csi_error_bound", "must be finite and non-negative");

    if (!(s.user_power_w(Mode::hrris_fixed) > 0.0))
        throw ConfigError("p_active_max_dbm", "amplifier budget must be below p_total_dbm");

    for (auto [v, f] : {std::pair{s.pathloss_exponents.user_en, "pathloss_exponents"},
                        {s.pathloss_exponents.user_hrris, "pathloss_exponents"},
                        {s.pathloss_exponents.user_eve, "pathloss_exponents"},
                        {s.pathloss_exponents.hrris_en, "pathloss_exponents"},
                        {s.rician_factors.user_en, "rician_factors"},
                        {s.rician_factors.user_hrris, "rician_factors"},
                        {s.rician_factors.user_eve, "rician_factors"},
                        {s.rician_factors.hrris_en, "rician_factors"}})
        if (!(v >= 0.0 && std::isfinite(v)))
            throw ConfigError(f, "must be non-negative");

    if (s.compute.total_bits <= 0)
        throw ConfigError("total_bits", "must be strictly positive");
    if (s.compute.cycles_per_bit <= 0)
        throw ConfigError("cycles_per_bit", "must be strictly positive");
    positive(s.compute.local_rate, "local_rate");
    positive(s.compute.edge_rate, "edge_rate");
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

struct DistanceSet {
    double user_en = 0.0;
    double user_hrris = 0.0;
    double user_eve = 0.0;
    double hrris_en = 0.0;

    // True when any link is shorter than the path-loss clamp.
    bool degenerate() const
    {
        return std::min({user_en, user_hrris, user_eve, hrris_en}) < kMinLinkDistance;
    }
};

inline DistanceSet link_distances(const Scenario& s)
{
    return {distance(s.user(), s.en()), distance(s.user(), s.surface()), distance(s.user(), s.eve()),
            distance(s.surface(), s.en())};
}

// ---------------------------------------------------------------------------
// Config text: UTF-8 key=value lines, '#' comments.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view text, const std::string& field)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end)
        throw ConfigError(field, "expected a number, got '" + std::string(text) + "'");
    return v;
}

inline std::int64_t parse_int(std::string_view text, const std::string& field)
{
    // Accept integral values written in scientific notation (e.g. 2e10).
    std::int64_t v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (!text.empty() && ec == std::errc{} && ptr == end)
        return v;
    const double d = parse_double(text, field);
    if (d != std::floor(d) || std::abs(d) > 9.0e15)
        throw ConfigError(field, "expected an integer, got '" + std::string(text) + "'");
    return static_cast<std::int64_t>(d);
}

inline std::size_t parse_count(std::string_view text, const std::string& field)
{
    const auto v = parse_int(text, field);
    if (v < 0)
        throw ConfigError(field, "must be non-negative");
    return static_cast<std::size_t>(v);
}

inline PerLink parse_per_link(std::string_view text, const std::string& field)
{
    const auto parts = split(text, ',');
    if (parts.size() != 4)
        throw ConfigError(field, "expected 4 comma-separated values (user_en,user_hrris,user_eve,hrris_en)");
    return {parse_double(parts[0], field), parse_double(parts[1], field), parse_double(parts[2], field),
            parse_double(parts[3], field)};
}

inline std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace detail

// Keys absent from the text keep their default values. An empty
// fixed_active_set resolves to the lowest a_active indices.
inline Scenario load_scenario(std::string_view text)
{
    Scenario s;
    bool explicit_set = false;
    bool explicit_shape = false;
    std::map<std::string, std::size_t> seen;

    std::size_t line_no = 0;
    for (auto raw : detail::split(text, '\n')) {
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected key=value");
        const std::string key(detail::trim(line.substr(0, eq)));
        const auto val = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
        if (seen.count(key))
            throw ConfigError(key, "duplicate key on line " + std::to_string(line_no));
        seen[key] = line_no;

        using namespace detail;
        if (key == "m_antennas") s.m_antennas = parse_count(val, key);
        else if (key == "e_antennas") s.e_antennas = parse_count(val, key);
        else if (key == "n_elements") s.n_elements = parse_count(val, key);
        else if (key == "a_active") s.a_active = parse_count(val, key);
        else if (key == "mode") s.mode = parse_mode(val);
        else if (key == "fixed_active_set") {
            s.fixed_active_set.clear();
            explicit_set = !val.empty();
            if (explicit_set) {
                for (auto item : split(val, ',')) {
                    const auto idx = parse_count(item, key);
                    if (idx == 0)
                        throw ConfigError(key, "indices are one-based");
                    s.fixed_active_set.push_back(idx - 1);
                }
            }
        }
        else if (key == "p_total_dbm") s.p_total_dbm = parse_double(val, key);
        else if (key == "p_active_max_dbm") s.p_active_max_dbm = parse_double(val, key);
        else if (key == "noise_power_dbm") s.noise_power_dbm = parse_double(val, key);
        else if (key == "eve_noise_power_dbm") s.eve_noise_power_dbm = parse_double(val, key);
        else if (key == "bandwidth_hz") s.bandwidth_hz = parse_double(val, key);
        else if (key == "csi_error_bound") s.csi_error_bound = parse_double(val, key);
        else if (key == "x_h_m") s.x_h_m = parse_double(val, key);
        else if (key == "x_u_m") s.x_u_m = parse_double(val, key);
        else if (key == "y_u_m") s.y_u_m = parse_double(val, key);
        else if (key == "x_eve_m") s.x_eve_m = parse_double(val, key);
        else if (key == "y_eve_m") s.y_eve_m = parse_double(val, key);
        else if (key == "pathloss_ref_db") s.pathloss_ref_db = parse_double(val, key);
        else if (key == "pathloss_exponents") s.pathloss_exponents = parse_per_link(val, key);
        else if (key == "rician_factors") s.rician_factors = parse_per_link(val, key);
        else if (key == "upa_shape") {
            const auto parts = split(val, ',');
            if (parts.size() != 2)
                throw ConfigError(key, "expected rows,cols");
            s.upa_shape = {parse_count(parts[0], key), parse_count(parts[1], key)};
            explicit_shape = true;
        }
        else if (key == "total_bits") s.compute.total_bits = parse_int(val, key);
        else if (key == "cycles_per_bit") s.compute.cycles_per_bit = parse_int(val, key);
        else if (key == "local_rate") s.compute.local_rate = parse_double(val, key);
        else if (key == "edge_rate") s.compute.edge_rate = parse_double(val, key);
        else
            throw ConfigError(key, "unknown key on line " + std::to_string(line_no));
    }

    if (!explicit_set) {
        if (s.a_active > s.n_elements)
            throw ConfigError("a_active", "exceeds n_elements");
        s.fixed_active_set = default_active_set(s.a_active);
    }
    if (!explicit_shape && seen.count("n_elements"))
        s.upa_shape = squarest_shape(s.n_elements);

    validate(s);
    return s;
}

// Inverse of load_scenario; every key is written so the text is self-contained.
inline std::string to_config_text(const Scenario& s)
{
    using detail::format_double;
    auto per_link = [](const PerLink& p) {
        return format_double(p.user_en) + "," + format_double(p.user_hrris) + "," + format_double(p.user_eve) +
               "," + format_double(p.hrris_en);
    };
    std::string set;
    for (std::size_t i = 0; i < s.fixed_active_set.size(); ++i)
        set += (i ? "," : "") + std::to_string(s.fixed_active_set[i] + 1);

    std::ostringstream os;
    os << "m_antennas=" << s.m_antennas << '\n'
       << "e_antennas=" << s.e_antennas << '\n'
       << "n_elements=" << s.n_elements << '\n'
       << "a_active=" << s.a_active << '\n'
       << "mode=" << to_string(s.mode) << '\n'
       << "fixed_active_set=" << set << '\n'
       << "p_total_dbm=" << format_double(s.p_total_dbm) << '\n'
       << "p_active_max_dbm=" << format_double(s.p_active_max_dbm) << '\n'
       << "noise_power_dbm=" << format_double(s.noise_power_dbm) << '\n'
       << "eve_noise_power_dbm=" << format_double(s.eve_noise_power_dbm) << '\n'
       << "bandwidth_hz=" << format_double(s.bandwidth_hz) << '\n'
       << "csi_error_bound=" << format_double(s.csi_error_bound) << '\n'
       << "x_h_m=" << format_double(s.x_h_m) << '\n'
       << "x_u_m=" << format_double(s.x_u_m) << '\n'
       << "y_u_m=" << format_double(s.y_u_m) << '\n'
       << "x_eve_m=" << format_double(s.x_eve_m) << '\n'
       << "y_eve_m=" << format_double(s.y_eve_m) << '\n'
       << "pathloss_ref_db=" << format_double(s.pathloss_ref_db) << '\n'
       << "pathloss_exponents=" << per_link(s.pathloss_exponents) << '\n'
       << "rician_factors=" << per_link(s.rician_factors) << '\n'
       << "upa_shape=" << s.upa_shape.rows << "," << s.upa_shape.cols << '\n'
       << "total_bits=" << s.compute.total_bits << '\n'
       << "cycles_per_bit=" << s.compute.cycles_per_bit << '\n'
       << "local_rate=" << format_double(s.compute.local_rate) << '\n'
       << "edge_rate=" << format_double(s.compute.edge_rate) << '\n';
    return os.str();
}

} // namespace hrris
