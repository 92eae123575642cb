// SPDX-License-Identifier: Apache-2.0
//
// Alternating latency minimisation for the HRRIS-assisted secure offloading
// link. Each outer iteration solves, in order,
//
//   1. the receive combiner for fixed surface coefficients (closed form),
//   2. the surface phases for a fixed combiner (co-phasing with the direct path),
//   3. the active amplitudes, either one coordinate sweep of the 1-D
//      fractional program (fixed active set) or top-A element selection plus
//      water-filling on a surrogate objective (dynamic active set),
//
// and the offload volume is chosen from the resulting secrecy rate.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Cholesky>

#include "hrris/channel.hpp"
#include "hrris/rates.hpp"
#include "hrris/rng.hpp"
#include "hrris/scenario.hpp"

namespace hrris {

// ---------------------------------------------------------------------------
// Combiner
// ---------------------------------------------------------------------------

// w = sqrt(P / sigma^2) Q^{-1} h maximises the SINR over all nonzero w.
inline CVector optimal_combiner(const HrrisState& hs, const ChannelSet& cs, double p_user, double sigma2)
{
    const CMatrix q = noise_covariance(cs, hs);
    const CVector h = effective_channel(cs, hs);
    return std::sqrt(p_user / sigma2) * q.llt().solve(h);
}

// ---------------------------------------------------------------------------
// Phases
// ---------------------------------------------------------------------------

inline double wrap_phase(double theta)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double t = std::fmod(theta, two_pi);
    if (t < 0.0)
        t += two_pi;
    return t >= two_pi ? 0.0 : t;
}

// Co-phases every cascaded path with the direct path w^H h_EN. The result
// lies in [0, 2*pi). A vanishing direct path uses reference phase 0.
inline std::vector<double> optimal_phases(const CVector& w, const ChannelSet& cs)
{
    const cplx direct = w.dot(cs.h_en);
    const double reference = std::abs(direct) > 0.0 ? std::arg(direct) : 0.0;
    const Eigen::RowVectorXcd wg = w.adjoint() * cs.g;
    std::vector<double> theta(cs.n());
    for (std::size_t n = 0; n < theta.size(); ++n) {
        const auto i = static_cast<Eigen::Index>(n);
        theta[n] = wrap_phase(reference - std::arg(wg[i] * cs.h_r[i]));
    }
    return theta;
}

inline void apply_phases(HrrisState& hs, std::span<const double> theta)
{
    for (std::size_t n = 0; n < theta.size(); ++n) {
        const auto i = static_cast<Eigen::Index>(n);
        hs.alpha[i] = std::polar(std::abs(hs.alpha[i]), theta[n]);
    }
}

inline void set_amplitude(HrrisState& hs, std::size_t n, double amplitude)
{
    const auto i = static_cast<Eigen::Index>(n);
    hs.alpha[i] = std::polar(amplitude, std::arg(hs.alpha[i]));
}

// ---------------------------------------------------------------------------
// Fixed active set: per-element fractional program
// ---------------------------------------------------------------------------

// With co-phased coefficients the SINR, divided by P / sigma^2, reads
// (x^2 a + x b + c) / (x^2 u + v) in the amplitude x = |alpha_n| of one
// active element.
struct SubproblemCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double u = 0.0;
    double v = 0.0;
    double d = 0.0;  // |h_{H,n}|^2 v - c, may be negative
    double xi = 0.0; // amplifier input power of element n
    double residual_budget = 0.0;

    double cap() const { return xi > 0.0 ? std::sqrt(residual_budget / xi) : 0.0; }
};

inline double fractional_objective(const SubproblemCoefficients& k, double x)
{
    return (x * x * k.a + x * k.b + k.c) / (x * x * k.u + k.v);
}

// Coefficients for active element n under combiner w. Assumes the current
// phases are co-phased with the direct path.
inline SubproblemCoefficients subproblem_coefficients(std::size_t n, const CVector& w, const HrrisState& hs,
                                                      const ChannelSet& cs, double p_user, double sigma2,
                                                      double pa_max)
{
    const Eigen::RowVectorXcd wg = w.adjoint() * cs.g;
    const auto i_n = static_cast<Eigen::Index>(n);

    double others = std::abs(w.dot(cs.h_en));
    double others_noise = w.squaredNorm();
    double others_power = 0.0;
    for (std::size_t i = 0; i < cs.n(); ++i) {
        if (i == n)
            continue;
        const auto ii = static_cast<Eigen::Index>(i);
        others += std::abs(hs.alpha[ii] * cs.h_r[ii] * wg[ii]);
        if (hs.is_active(i)) {
            others_noise += std::norm(hs.alpha[ii]) * std::norm(wg[ii]);
            others_power += std::norm(hs.alpha[ii]) * amplifier_input_power(cs, i, p_user, sigma2);
        }
    }

    SubproblemCoefficients k;
    const double h2 = std::norm(cs.h_r[i_n]);
    k.u = std::norm(wg[i_n]);
    k.a = h2 * k.u;
    k.c = others * others;
    k.b = 2.0 * std::abs(cs.h_r[i_n] * wg[i_n]) * others;
    k.v = others_noise;
    k.d = h2 * k.v - k.c;
    k.xi = amplifier_input_power(cs, n, p_user, sigma2);
    k.residual_budget = std::max(pa_max - others_power, 0.0);
    return k;
}

// Maximiser of the fractional objective over [0, cap]. The objective is
// unimodal on [0, inf) with its peak at the positive root of
// b x^2 - 2 d x - b v / u = 0.
inline double fixed_amplitude_update(const SubproblemCoefficients& k)
{
    const double cap = k.cap();
    if (k.u <= 0.0)
        return cap;
    if (k.b <= 0.0) {
        // Monotone in x: compare both ends of the interval.
        return fractional_objective(k, 0.0) > fractional_objective(k, cap) ? 0.0 : cap;
    }
    const double ratio = k.d / k.b;
    const double root = std::sqrt(ratio * ratio + k.v / k.u);
    // Avoid cancellation when d < 0 by using the product of roots (-v/u).
    const double peak = ratio >= 0.0 ? ratio + root : (k.v / k.u) / (root - ratio);
    return std::min(cap, peak);
}

// ---------------------------------------------------------------------------
// Dynamic active set: top-A selection and water-filling
// ---------------------------------------------------------------------------

struct WaterfillAllocation {
    std::vector<std::size_t> selected; // ascending
    std::vector<double> powers;        // aligned with `selected`
    double water_level = 0.0;          // 1/mu
};

// Indices of the `count` largest gains, ties to the lower index, returned ascending.
inline std::vector<std::size_t> top_indices(std::span<const double> gains, std::size_t count)
{
    std::vector<std::size_t> order(gains.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    count = std::min(count, order.size());
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return gains[l] > gains[r]; });
    order.resize(count);
    std::sort(order.begin(), order.end());
    return order;
}

// Maximises sum log(1 + g_n p_n) subject to sum p_n <= budget, p_n >= 0:
// p_n = (level - 1/g_n)^+ with the level found by bisection on the budget.
inline WaterfillAllocation waterfill(std::span<const double> gains, double budget)
{
    WaterfillAllocation out;
    out.selected.resize(gains.size());
    std::iota(out.selected.begin(), out.selected.end(), std::size_t{0});
    out.powers.assign(gains.size(), 0.0);

    double max_floor = 0.0;
    bool any = false;
    for (double g : gains) {
        if (g > 0.0) {
            any = true;
            max_floor = std::max(max_floor, 1.0 / g);
        }
    }
    if (!any || budget <= 0.0)
        return out;

    auto spent = [&](double level) {
        double sum = 0.0;
        for (double g : gains)
            if (g > 0.0)
                sum += std::max(level - 1.0 / g, 0.0);
        return sum;
    };

    double lo = 0.0;
    double hi = max_floor + budget;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (spent(mid) > budget ? hi : lo) = mid;
    }

    // Exact level on the support found by bisection. Elements whose floor
    // reaches the level are dropped until the support is consistent.
    std::vector<double> floors;
    for (double g : gains)
        if (g > 0.0 && 1.0 / g < hi)
            floors.push_back(1.0 / g);
    std::sort(floors.begin(), floors.end());
    double level = 0.0;
    while (!floors.empty()) {
        level = (budget + std::accumulate(floors.begin(), floors.end(), 0.0)) / static_cast<double>(floors.size());
        if (floors.back() < level)
            break;
        floors.pop_back();
    }
    out.water_level = level;
    for (std::size_t i = 0; i < gains.size(); ++i)
        if (gains[i] > 0.0 && 1.0 / gains[i] < level)
            out.powers[i] = std::max(level - 1.0 / gains[i], 0.0);
    return out;
}

struct DynamicUpdate {
    HrrisState state;
    WaterfillAllocation allocation; // `selected` holds element indices
};

// Selects the A elements with the largest P a_n / xi_n and water-fills the
// amplifier budget across them. Amplitudes are max(sqrt(p_n / xi_n), 1) on
// the selected set and 1 elsewhere; phases are kept from `current`.
inline DynamicUpdate dynamic_select_and_allocate(const CVector& w, const HrrisState& current, const ChannelSet& cs,
                                                 double p_user, double sigma2, std::size_t a_budget, double pa_max)
{
    const auto n_el = cs.n();
    const Eigen::RowVectorXcd wg = w.adjoint() * cs.g;
    const double scale = sigma2 * w.squaredNorm();
    std::vector<double> gains(n_el);
    std::vector<double> xi(n_el);
    for (std::size_t n = 0; n < n_el; ++n) {
        const auto i = static_cast<Eigen::Index>(n);
        const double a = std::norm(cs.h_r[i]) * std::norm(wg[i]);
        xi[n] = amplifier_input_power(cs, n, p_user, sigma2);
        gains[n] = p_user * a / (scale * xi[n]);
    }

    DynamicUpdate out;
    const auto selected = top_indices(gains, a_budget);
    std::vector<double> chosen(selected.size());
    for (std::size_t k = 0; k < selected.size(); ++k)
        chosen[k] = gains[selected[k]];
    out.allocation = waterfill(chosen, pa_max);
    out.allocation.selected = selected;

    out.state = current;
    out.state.active_set = selected;
    for (std::size_t n = 0; n < n_el; ++n)
        set_amplitude(out.state, n, 1.0);
    for (std::size_t k = 0; k < selected.size(); ++k) {
        const double p = out.allocation.powers[k];
        set_amplitude(out.state, selected[k], std::max(std::sqrt(p / xi[selected[k]]), 1.0));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Offload volume
// ---------------------------------------------------------------------------

// Real-valued split equating local and edge latency.
inline double balanced_offload(double secrecy_rate_bps, const ComputeParams& cp)
{
    const double l = static_cast<double>(cp.total_bits);
    const double nu = static_cast<double>(cp.cycles_per_bit);
    const double fl = cp.local_rate;
    const double fe = cp.edge_rate;
    const double r = secrecy_rate_bps;
    return l * nu * r * fe / (fe * fl + nu * r * (fe + fl));
}

// Best integer offload volume; zero when no secrecy rate is available.
inline std::int64_t optimal_offload(double secrecy_rate_bps, const ComputeParams& cp)
{
    if (!(secrecy_rate_bps > 0.0))
        return 0;
    const double target = balanced_offload(secrecy_rate_bps, cp);
    auto clamp = [&](double x) {
        return std::clamp(static_cast<std::int64_t>(x), std::int64_t{0}, cp.total_bits);
    };
    const auto lo = clamp(std::floor(target));
    const auto hi = clamp(std::ceil(target));
    return latency(hi, secrecy_rate_bps, cp).total < latency(lo, secrecy_rate_bps, cp).total ? hi : lo;
}

// ---------------------------------------------------------------------------
// Alternating optimisation
// ---------------------------------------------------------------------------

struct SolverOptions {
    double tolerance = 1e-5; // relative change of R_EN
    int max_iterations = 50;
};

struct Solution {
    Mode mode = Mode::hrris_fixed;
    CVector combiner;
    HrrisState surface;
    std::int64_t offload_bits = 0;
    double sinr = 0.0;
    double rate_en = 0.0;
    double leakage_bound = 0.0;
    double secrecy_rate = 0.0;
    double latency_local = 0.0;
    double latency_edge = 0.0;
    double latency = 0.0;
    int iterations = 0;
    bool converged = false;
    double active_power = 0.0;    // recomputed from the returned amplitudes
    bool budget_exceeded = false; // active_power above P_a^max (dynamic clamp)
    std::vector<double> rate_history; // R_EN at the end of each iteration
};

// Fills rates, offload volume and latencies from combiner and surface.
inline void finalize(Solution& sol, const Scenario& s, const ChannelSet& cs)
{
    const double p = s.user_power_w(sol.mode);
    const double sigma2 = s.noise_w();
    sol.sinr = sinr(sol.combiner, sol.surface, cs, p, sigma2);
    sol.rate_en = achievable_rate(sol.sinr, s.bandwidth_hz);
    sol.leakage_bound = leakage_bound(cs.h_e_est, s.csi_error_bound, p, s.eve_noise_w(), s.bandwidth_hz);
    sol.secrecy_rate = secrecy_rate(sol.rate_en, sol.leakage_bound);
    sol.offload_bits = optimal_offload(sol.secrecy_rate, s.compute);
    const auto lat = latency(sol.offload_bits, sol.secrecy_rate, s.compute);
    sol.latency_local = lat.local;
    sol.latency_edge = lat.edge;
    sol.latency = lat.total;
    sol.active_power = active_power(sol.surface, cs, p, sigma2);
    const double budget = s.active_budget_w(sol.mode);
    sol.budget_exceeded = sol.active_power > budget * (1.0 + 1e-9) + 1e-300;
}

// Random start: uniform phases; active amplitudes share the budget equally
// in power terms, so the initial point spends exactly P_a^max.
inline HrrisState initial_state(const Scenario& s, const ChannelSet& cs, Rng& rng)
{
    HrrisState hs;
    hs.alpha.resize(static_cast<Eigen::Index>(cs.n()));
    for (std::size_t n = 0; n < cs.n(); ++n)
        hs.alpha[static_cast<Eigen::Index>(n)] = std::polar(1.0, 2.0 * std::numbers::pi * uniform01(rng));

    if (is_hybrid(s.mode) && !s.fixed_active_set.empty()) {
        hs.active_set = s.fixed_active_set;
        const double p = s.user_power_w(s.mode);
        const double sigma2 = s.noise_w();
        double xi_sum = 0.0;
        for (auto n : hs.active_set)
            xi_sum += amplifier_input_power(cs, n, p, sigma2);
        const double amp = std::sqrt(s.active_budget_w(s.mode) / xi_sum);
        for (auto n : hs.active_set)
            set_amplitude(hs, n, amp);
    }
    return hs;
}

// Runs the alternating loop for s.mode on one channel realization. `rng`
// supplies the random initial phases. The best-SINR iterate is returned;
// the combiner is refreshed for the returned surface before evaluation.
inline Solution run_alternating(const Scenario& s, const ChannelSet& cs, Rng& rng, const SolverOptions& opt = {})
{
    const Mode mode = s.mode;
    const double p = s.user_power_w(mode);
    const double sigma2 = s.noise_w();
    const double pa_max = s.active_budget_w(mode);

    HrrisState state = initial_state(s, cs, rng);

    Solution sol;
    sol.mode = mode;
    double best_gamma = -1.0;
    HrrisState best_state = state;
    double prev_rate = 0.0;

    for (int it = 1; it <= opt.max_iterations; ++it) {
        const CVector w = optimal_combiner(state, cs, p, sigma2);
        if (mode != Mode::ris_random)
            apply_phases(state, optimal_phases(w, cs));

        if (mode == Mode::hrris_fixed) {
            for (auto n : state.active_set) {
                const auto k = subproblem_coefficients(n, w, state, cs, p, sigma2, pa_max);
                set_amplitude(state, n, fixed_amplitude_update(k));
            }
        } else if (mode == Mode::hrris_dynamic) {
            state = dynamic_select_and_allocate(w, state, cs, p, sigma2, s.a_active, pa_max).state;
        }

        const double gamma = sinr(w, state, cs, p, sigma2);
        const double rate = achievable_rate(gamma, s.bandwidth_hz);
        sol.rate_history.push_back(rate);
        sol.iterations = it;
        if (gamma > best_gamma) {
            best_gamma = gamma;
            best_state = state;
        }
        if (it > 1 && std::abs(rate - prev_rate) <= opt.tolerance * std::max(prev_rate, 1e-300)) {
            sol.converged = true;
            break;
        }
        prev_rate = rate;
    }

    sol.surface = std::move(best_state);
    sol.combiner = optimal_combiner(sol.surface, cs, p, sigma2);
    finalize(sol, s, cs);
    return sol;
}

// Reference point with everything computed locally.
inline Solution local_only_solution(const ComputeParams& cp)
{
    Solution sol;
    const auto lat = latency(0, 0.0, cp);
    sol.latency_local = lat.local;
    sol.latency_edge = lat.edge;
    sol.latency = lat.total;
    sol.converged = true;
    return sol;
}

} // namespace hrris
