// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hrris/optimizer.hpp"
#include "oracles.hpp"

using namespace hrris;

namespace {

constexpr double kSigma2 = 1e-11;

ChannelSet random_channels(std::size_t m, std::size_t n, std::mt19937_64& rng)
{
    ChannelSet cs;
    const auto mi = static_cast<Eigen::Index>(m);
    const auto ni = static_cast<Eigen::Index>(n);
    cs.h_en = 1e-4 * oracle::random_complex_vector(mi, rng);
    cs.h_r = 1e-2 * oracle::random_complex_vector(ni, rng);
    cs.g.resize(mi, ni);
    for (Eigen::Index j = 0; j < ni; ++j)
        cs.g.col(j) = 1e-3 * oracle::random_complex_vector(mi, rng);
    cs.h_e_est = 1e-5 * oracle::random_complex_vector(1, rng);
    cs.h_e_true = cs.h_e_est;
    return cs;
}

HrrisState unit_state(std::size_t n, std::vector<std::size_t> active, double amp, std::mt19937_64& rng)
{
    HrrisState hs;
    hs.alpha.resize(static_cast<Eigen::Index>(n));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (Eigen::Index i = 0; i < hs.alpha.size(); ++i)
        hs.alpha[i] = std::polar(1.0, phase(rng));
    hs.active_set = std::move(active);
    for (auto k : hs.active_set)
        set_amplitude(hs, k, amp);
    return hs;
}

} // namespace

TEST(Combiner, BeatsRandomProbes)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        const auto cs = random_channels(2 + rng() % 4, n, rng);
        const auto hs = unit_state(n, {0}, 20.0, rng);
        const CVector w = optimal_combiner(hs, cs, 1.0, kSigma2);
        const double best = sinr(w, hs, cs, 1.0, kSigma2);
        // Closed form: P/sigma^2 h^H Q^{-1} h.
        const CVector h = effective_channel(cs, hs);
        const double closed = (h.adjoint() * noise_covariance(cs, hs).inverse() * h)(0, 0).real() / kSigma2;
        EXPECT_NEAR(best, closed, 1e-9 * closed);
        for (int probe = 0; probe < 1000; ++probe) {
            const CVector v = oracle::random_complex_vector(w.size(), rng);
            EXPECT_LE(sinr(v, hs, cs, 1.0, kSigma2), best * (1.0 + 1e-12));
            // Small perturbations of the optimum cannot help either.
            EXPECT_LE(sinr(w + 1e-3 * w.norm() * v, hs, cs, 1.0, kSigma2), best * (1.0 + 1e-12));
        }
    }
}

TEST(Phases, WrapDomain)
{
    EXPECT_EQ(wrap_phase(0.0), 0.0);
    EXPECT_NEAR(wrap_phase(-std::numbers::pi / 2), 1.5 * std::numbers::pi, 1e-15);
    EXPECT_NEAR(wrap_phase(5.0 * std::numbers::pi), std::numbers::pi, 1e-14);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int k = 0; k < 10000; ++k) {
        const double x = u(rng);
        const double t = wrap_phase(x);
        EXPECT_GE(t, 0.0);
        EXPECT_LT(t, 2.0 * std::numbers::pi);
        EXPECT_NEAR(std::abs(std::polar(1.0, t) - std::polar(1.0, x)), 0.0, 1e-12);
    }
}

TEST(Phases, SmallExample)
{
    ChannelSet cs;
    cs.h_en = CVector::Constant(1, cplx(1.0, 0.0));
    cs.h_r = CVector::Ones(2);
    cs.g.resize(1, 2);
    cs.g << cplx(1.0, 0.0), cplx(0.0, 1.0);
    const auto theta = optimal_phases(CVector::Ones(1), cs);
    EXPECT_NEAR(theta[0], 0.0, 1e-15);
    EXPECT_NEAR(theta[1], 1.5 * std::numbers::pi, 1e-15);

    // Without a direct path the reference phase is zero.
    cs.h_en.setZero();
    const auto theta0 = optimal_phases(CVector::Ones(1), cs);
    EXPECT_NEAR(theta0[1], 1.5 * std::numbers::pi, 1e-15);
}

TEST(Phases, AlignmentAndIdempotence)
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 20;
        const auto cs = random_channels(1 + rng() % 5, n, rng);
        auto hs = unit_state(n, {0}, 1.0 + static_cast<double>(rng() % 10), rng);
        const CVector w = oracle::random_complex_vector(static_cast<Eigen::Index>(cs.m()), rng);
        const double before = std::abs(w.dot(effective_channel(cs, hs)));
        const auto theta = optimal_phases(w, cs);
        apply_phases(hs, theta);
        const double after = std::abs(w.dot(effective_channel(cs, hs)));
        // Triangle inequality met with equality.
        double sum = std::abs(w.dot(cs.h_en));
        const Eigen::RowVectorXcd wg = w.adjoint() * cs.g;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i)
            sum += std::abs(hs.alpha[i] * wg[i] * cs.h_r[i]);
        EXPECT_NEAR(after, sum, 1e-12 * sum);
        EXPECT_GE(after, before * (1.0 - 1e-12));
        // Phases do not depend on the current coefficients.
        const auto again = optimal_phases(w, cs);
        for (std::size_t k = 0; k < n; ++k)
            EXPECT_EQ(again[k], theta[k]);
    }
}

TEST(FixedAmplitude, ClosedFormExample)
{
    SubproblemCoefficients k;
    k.a = 1.0;
    k.b = 2.0;
    k.c = 1.0;
    k.u = 1.0;
    k.v = 1.0;
    k.d = 0.0; // |h|^2 v - c with |h|^2 = a / u = 1
    k.xi = 1.0;
    k.residual_budget = 100.0;
    EXPECT_NEAR(fixed_amplitude_update(k), 1.0, 1e-15);
    EXPECT_NEAR(fractional_objective(k, 1.0), 2.0, 1e-15);

    k.xi = 4.0;
    k.residual_budget = 1.0; // cap 0.5 below the peak
    EXPECT_NEAR(fixed_amplitude_update(k), 0.5, 1e-15);

    k.u = 0.0;
    EXPECT_NEAR(fixed_amplitude_update(k), 0.5, 1e-15);
}

TEST(FixedAmplitude, MatchesDenseGrid)
{
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> logu(-3.0, 3.0);
    for (int trial = 0; trial < 1000; ++trial) {
        SubproblemCoefficients k;
        const double h2 = std::pow(10.0, logu(rng));
        const double others = std::pow(10.0, logu(rng));
        k.u = std::pow(10.0, logu(rng));
        k.v = std::pow(10.0, logu(rng));
        k.a = h2 * k.u;
        k.c = others * others;
        k.b = 2.0 * std::sqrt(k.a * k.c);
        k.d = h2 * k.v - k.c;
        k.xi = std::pow(10.0, logu(rng));
        k.residual_budget = std::pow(10.0, logu(rng));
        const double x = fixed_amplitude_update(k);
        ASSERT_GE(x, 0.0);
        ASSERT_LE(x, k.cap() * (1.0 + 1e-12));
        const double mine = fractional_objective(k, x);
        const double grid =
            oracle::grid_maximum([&](double t) { return fractional_objective(k, t); }, 0.0, k.cap(), 10'000);
        EXPECT_GE(mine, grid * (1.0 - 1e-12));
    }
}

TEST(FixedAmplitude, CoefficientsReproduceSinr)
{
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 10;
        const auto cs = random_channels(1 + rng() % 5, n, rng);
        auto hs = unit_state(n, {0, n - 1}, 10.0, rng);
        const CVector w = oracle::random_complex_vector(static_cast<Eigen::Index>(cs.m()), rng);
        apply_phases(hs, optimal_phases(w, cs));
        const auto k = subproblem_coefficients(0, w, hs, cs, 1.0, kSigma2, 1e-3);
        EXPECT_NEAR(k.a, std::norm(cs.h_r[0]) * k.u, 1e-12 * k.a);
        EXPECT_NEAR(k.b, 2.0 * std::sqrt(k.a * k.c), 1e-12 * k.b);
        EXPECT_NEAR(k.d, std::norm(cs.h_r[0]) * k.v - k.c, 1e-12 * std::abs(k.c));
        const double x = std::abs(hs.alpha[0]);
        const double gamma = sinr(w, hs, cs, 1.0, kSigma2);
        EXPECT_NEAR(fractional_objective(k, x) / kSigma2, gamma, 1e-9 * gamma);
        // Residual budget excludes this element only.
        const double others_power = std::norm(hs.alpha[static_cast<Eigen::Index>(n - 1)]) *
                                    amplifier_input_power(cs, n - 1, 1.0, kSigma2);
        EXPECT_NEAR(k.residual_budget, std::max(1e-3 - others_power, 0.0), 1e-15);
    }
}

TEST(Waterfill, SingleElementTakesBudget)
{
    const std::vector<double> g{3.0};
    const auto a = waterfill(g, 2.0);
    EXPECT_NEAR(a.powers[0], 2.0, 1e-15);
    EXPECT_NEAR(a.water_level, 2.0 + 1.0 / 3.0, 1e-15);
}

TEST(Waterfill, SymmetricSplit)
{
    const std::vector<double> g(4, 5.0);
    const auto a = waterfill(g, 1.0);
    for (double p : a.powers)
        EXPECT_NEAR(p, 0.25, 1e-15);
}

TEST(Waterfill, ZeroBudgetOrGains)
{
    const std::vector<double> g{1.0, 2.0};
    for (double p : waterfill(g, 0.0).powers)
        EXPECT_EQ(p, 0.0);
    const std::vector<double> z{0.0, 0.0};
    for (double p : waterfill(z, 1.0).powers)
        EXPECT_EQ(p, 0.0);
}

TEST(Waterfill, MatchesProjectedGradientAndKkt)
{
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> logu(-1.0, 1.5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        std::vector<double> g(n);
        for (auto& x : g)
            x = std::pow(10.0, logu(rng));
        const double budget = std::pow(10.0, logu(rng) - 0.5);
        const auto a = waterfill(g, budget);

        double total = 0.0;
        for (double p : a.powers) {
            EXPECT_GE(p, 0.0);
            total += p;
        }
        EXPECT_NEAR(total, budget, 1e-12 * budget);
        for (std::size_t i = 0; i < n; ++i) {
            if (a.powers[i] > 0.0)
                EXPECT_NEAR(a.powers[i] + 1.0 / g[i], a.water_level, 1e-12 * a.water_level);
            else
                EXPECT_GE(1.0 / g[i], a.water_level * (1.0 - 1e-12));
        }

        const auto ref = oracle::projected_gradient_waterfill(g, budget);
        const double f_mine = oracle::log_sum_objective(g, a.powers);
        const double f_ref = oracle::log_sum_objective(g, ref);
        EXPECT_GE(f_mine, f_ref - 1e-9 * std::abs(f_ref));
        for (std::size_t i = 0; i < n; ++i)
            EXPECT_NEAR(a.powers[i], ref[i], 1e-6 * budget);
    }
}

TEST(TopIndices, TiesGoToLowerIndex)
{
    const std::vector<double> g{1.0, 3.0, 2.0, 3.0, 0.5};
    EXPECT_EQ(top_indices(g, 2), (std::vector<std::size_t>{1, 3}));
    EXPECT_EQ(top_indices(g, 3), (std::vector<std::size_t>{1, 2, 3}));
    const std::vector<double> flat(5, 1.0);
    EXPECT_EQ(top_indices(flat, 2), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(top_indices(flat, 9).size(), 5u);
}

TEST(Dynamic, SelectionAndAmplitudeFloor)
{
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 4 + rng() % 20;
        const std::size_t a = 1 + rng() % 4;
        const auto cs = random_channels(3, n, rng);
        const auto hs = unit_state(n, {0}, 5.0, rng);
        const CVector w = oracle::random_complex_vector(3, rng);
        const auto up = dynamic_select_and_allocate(w, hs, cs, 1.0, kSigma2, a, 1e-3);
        EXPECT_EQ(up.state.active_set.size(), std::min(a, n));
        EXPECT_TRUE(up.state.satisfies_constraints(a));
        for (std::size_t k = 0; k < n; ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            EXPECT_GE(std::abs(up.state.alpha[i]), 1.0 - 1e-12);
            EXPECT_NEAR(std::arg(up.state.alpha[i] / hs.alpha[i]), 0.0, 1e-12);
        }
        // The selection is invariant to the scale of the combiner.
        const auto scaled = dynamic_select_and_allocate(1e4 * w, hs, cs, 1.0, kSigma2, a, 1e-3);
        EXPECT_EQ(scaled.state.active_set, up.state.active_set);
        for (std::size_t k = 0; k < up.allocation.powers.size(); ++k)
            EXPECT_NEAR(scaled.allocation.powers[k], up.allocation.powers[k], 1e-9 * 1e-3);
    }
}

TEST(Offload, ZeroRate)
{
    EXPECT_EQ(optimal_offload(0.0, ComputeParams{}), 0);
    EXPECT_EQ(optimal_offload(-1.0, ComputeParams{}), 0);
}

TEST(Offload, Example)
{
    const ComputeParams cp;
    EXPECT_NEAR(balanced_offload(2e6, cp), 220858.895705521, 1e-6);
    EXPECT_EQ(optimal_offload(2e6, cp), 220859);
}

TEST(Offload, MatchesExhaustiveSearch)
{
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> logu(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        ComputeParams cp;
        cp.total_bits = 1 + static_cast<std::int64_t>(rng() % 1000);
        cp.cycles_per_bit = 1 + static_cast<std::int64_t>(rng() % 2000);
        cp.local_rate = std::pow(10.0, 7.0 + 3.0 * logu(rng));
        cp.edge_rate = std::pow(10.0, 8.0 + 3.0 * logu(rng));
        const double r = std::pow(10.0, 3.0 + 5.0 * logu(rng));
        const auto mine = optimal_offload(r, cp);
        const auto best = oracle::exhaustive_offload(r, cp);
        const double d_mine = latency(mine, r, cp).total;
        const double d_best = latency(best, r, cp).total;
        EXPECT_LE(d_mine, d_best * (1.0 + 1e-12)) << "L=" << cp.total_bits << " r=" << r;
        EXPECT_LE(latency(mine, r, cp).total, cp.local_only_latency() * (1.0 + 1e-12));
    }
}

TEST(Alternating, NoSurfaceReducesToMrc)
{
    std::mt19937_64 gen(2);
    ChannelSet cs;
    cs.h_en = 1e-4 * oracle::random_complex_vector(5, gen);
    cs.h_r.resize(0);
    cs.g.resize(5, 0);
    cs.h_e_est = CVector::Constant(1, cplx(1e-6, 0.0));
    cs.h_e_true = cs.h_e_est;
    Scenario s;
    s.mode = Mode::ris_optimized;
    Rng rng(1);
    const auto sol = run_alternating(s, cs, rng);
    const double mrc = s.user_power_w(s.mode) * cs.h_en.squaredNorm() / s.noise_w();
    EXPECT_NEAR(sol.sinr, mrc, 1e-9 * mrc);
    EXPECT_TRUE(sol.converged);
}

TEST(Alternating, MonotoneHistory)
{
    for (Mode mode : {Mode::ris_optimized, Mode::hrris_fixed}) {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            Scenario s;
            s.mode = mode;
            s.a_active = 1 + seed % 3;
            s.fixed_active_set = default_active_set(s.a_active);
            const auto cs = synthesize_channels(s, seed);
            Rng rng = substream(seed, Substream::phase_init);
            const auto sol = run_alternating(s, cs, rng);
            for (std::size_t k = 1; k < sol.rate_history.size(); ++k)
                EXPECT_GE(sol.rate_history[k], sol.rate_history[k - 1] * (1.0 - 1e-12))
                    << to_string(mode) << " seed " << seed << " iteration " << k;
        }
    }
}

TEST(Alternating, FeasibleSolutions)
{
    for (Mode mode : {Mode::ris_random, Mode::ris_optimized, Mode::hrris_fixed, Mode::hrris_dynamic}) {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            Scenario s;
            s.mode = mode;
            s.a_active = 3;
            s.fixed_active_set = default_active_set(3);
            const auto cs = synthesize_channels(s, seed);
            Rng rng = substream(seed, Substream::phase_init);
            const auto sol = run_alternating(s, cs, rng);
            EXPECT_TRUE(sol.surface.satisfies_constraints(is_hybrid(mode) ? 3 : 0));
            EXPECT_GE(sol.offload_bits, 0);
            EXPECT_LE(sol.offload_bits, s.compute.total_bits);
            EXPECT_LE(sol.latency, s.compute.local_only_latency() * (1.0 + 1e-12));
            if (mode == Mode::hrris_fixed)
                EXPECT_FALSE(sol.budget_exceeded);
            EXPECT_EQ(sol.budget_exceeded, sol.active_power > s.active_budget_w(mode) * (1.0 + 1e-9) + 1e-300);
            EXPECT_LE(sol.iterations, 50);
        }
    }
}

// No small feasible perturbation of the returned surface raises the SINR by more than 1%.
TEST(Alternating, LocalOptimalityAudit)
{
    std::mt19937_64 gen(97);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    std::uniform_real_distribution<double> shrink(0.9, 1.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Scenario s;
        s.mode = Mode::hrris_fixed;
        const auto cs = synthesize_channels(s, seed);
        Rng rng = substream(seed, Substream::phase_init);
        const auto sol = run_alternating(s, cs, rng);
        const double p = s.user_power_w(s.mode);
        for (int probe = 0; probe < 200; ++probe) {
            HrrisState hs = sol.surface;
            for (Eigen::Index i = 0; i < hs.alpha.size(); ++i)
                hs.alpha[i] *= std::polar(1.0, jitter(gen));
            for (auto n : hs.active_set)
                hs.alpha[static_cast<Eigen::Index>(n)] *= shrink(gen);
            const CVector w = optimal_combiner(hs, cs, p, s.noise_w());
            EXPECT_LE(sinr(w, hs, cs, p, s.noise_w()), 1.01 * sol.sinr);
        }
    }
}

// Next to the eavesdropper the leakage bound swallows the link rate, so
// nothing is offloaded and the latency equals local execution.
TEST(Alternating, NoSecrecyMeansLocalExecution)
{
    Scenario s;
    s.x_u_m = 30.0;
    s.y_u_m = 8.0;
    int seen = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto cs = synthesize_channels(s, seed);
        Rng rng = substream(seed, Substream::phase_init);
        const auto sol = run_alternating(s, cs, rng);
        if (sol.secrecy_rate == 0.0) {
            ++seen;
            EXPECT_EQ(sol.offload_bits, 0);
            EXPECT_DOUBLE_EQ(sol.latency, 0.45);
        }
    }
    EXPECT_GT(seen, 0);
}

TEST(LocalOnly, Latency)
{
    const auto sol = local_only_solution(ComputeParams{});
    EXPECT_DOUBLE_EQ(sol.latency, 0.45);
    EXPECT_EQ(sol.offload_bits, 0);
}
