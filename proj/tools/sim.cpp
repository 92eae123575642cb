// SPDX-License-Identifier: Apache-2.0
//
// sim --config <file> --sweep <axis>=<start>:<stop>:<step> --trials <k>
//     --seed <u64> --modes <csv-list> --out <path> [--deterministic]
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hrris/hrris.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct SweepArg {
    hrris::Axis axis;
    std::vector<double> values;
};

SweepArg parse_sweep(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw hrris::ConfigError("sweep", "expected <axis>=<start>:<stop>:<step>");
    const auto axis = hrris::parse_axis(text.substr(0, eq));
    const auto parts = hrris::detail::split(std::string_view(text).substr(eq + 1), ':');
    if (parts.size() != 3)
        throw hrris::ConfigError("sweep", "expected <start>:<stop>:<step>");
    const double start = hrris::detail::parse_double(parts[0], "sweep");
    const double stop = hrris::detail::parse_double(parts[1], "sweep");
    const double step = hrris::detail::parse_double(parts[2], "sweep");
    return {axis, hrris::axis_range(start, stop, step)};
}

std::vector<hrris::RunMode> parse_modes(const std::string& text)
{
    std::vector<hrris::RunMode> out;
    for (auto item : hrris::detail::split(text, ','))
        out.push_back(hrris::parse_run_mode(item));
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw hrris::IoError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_summary(const hrris::ResultTable& table)
{
    std::printf("%-14s %-14s %12s %12s %14s\n", std::string(to_string(table.spec.axis)).c_str(), "mode",
                "mean_lat_s", "median_lat_s", "mean_rs_bps");
    for (const auto& c : hrris::summarize(table))
        std::printf("%-14.6g %-14s %12.6f %12.6f %14.6g\n", c.value, std::string(to_string(c.mode)).c_str(),
                    c.mean_latency, c.median_latency, c.mean_secrecy_rate);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"HRRIS-assisted secure offloading latency simulator"};
    std::string config_path;
    std::string sweep_text;
    std::size_t trials = 200;
    std::uint64_t seed = 0;
    std::string modes_text = "local_only,ris_random,ris_optimized,hrris_fixed,hrris_dynamic";
    std::string out_path;
    bool deterministic = false;
    unsigned threads = 0;
    bool quiet = false;
    bool independent = false;

    app.add_option("--config", config_path, "scenario file (key=value lines)")->required();
    app.add_option("--sweep", sweep_text, "<axis>=<start>:<stop>:<step>")->required();
    app.add_option("--trials", trials, "channel realizations per axis value");
    app.add_option("--seed", seed, "base seed");
    app.add_option("--modes", modes_text, "comma-separated modes");
    app.add_option("--out", out_path, "CSV output path")->required();
    app.add_flag("--deterministic", deterministic, "omit the timestamp comment");
    app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
    app.add_flag("--quiet", quiet, "do not print the summary table");
    app.add_flag("--independent-values", independent, "draw fresh channels at every axis value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    hrris::ResultTable table;
    try {
        const auto base = hrris::load_scenario(read_file(config_path));
        const auto sweep = parse_sweep(sweep_text);
        hrris::SweepSpec spec;
        spec.axis = sweep.axis;
        spec.values = sweep.values;
        spec.trials = trials;
        spec.base_seed = seed;
        spec.modes = parse_modes(modes_text);
        spec.paired_values = !independent;
        table = hrris::run_sweep(spec, base, threads);
    } catch (const hrris::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const hrris::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    }

    try {
        hrris::write_csv(table, out_path, deterministic);
    } catch (const hrris::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    }
    if (!quiet)
        print_summary(table);
    return 0;
}
