// SPDX-License-Identifier: Apache-2.0
//
// Link and latency evaluation: effective channel, amplifier power, SINR at
// the edge node, achievable/leakage/secrecy rates, and offloading latency.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hrris/channel.hpp"
#include "hrris/scenario.hpp"

namespace hrris {

// Surface configuration: coefficient per element plus the active-element set.
// Passive elements (outside active_set) carry unit amplitude.
struct HrrisState {
    CVector alpha;
    std::vector<std::size_t> active_set; // ascending, zero-based

    std::size_t size() const { return static_cast<std::size_t>(alpha.size()); }

    bool is_active(std::size_t n) const
    {
        return std::binary_search(active_set.begin(), active_set.end(), n);
    }

    // Phi: the passive coefficients, zero on active positions.
    CVector passive_part() const
    {
        CVector phi = alpha;
        for (auto n : active_set)
            phi[static_cast<Eigen::Index>(n)] = 0.0;
        return phi;
    }

    // Psi: the active coefficients, zero on passive positions.
    CVector active_part() const
    {
        CVector psi = CVector::Zero(alpha.size());
        for (auto n : active_set)
            psi[static_cast<Eigen::Index>(n)] = alpha[static_cast<Eigen::Index>(n)];
        return psi;
    }

    // Checks the unit-modulus rule for passive elements and the set size.
    bool satisfies_constraints(std::size_t a_budget, double tol = 1e-9) const
    {
        if (active_set.size() > a_budget)
            return false;
        for (std::size_t i = 0; i < active_set.size(); ++i)
            if (active_set[i] >= size() || (i > 0 && active_set[i] <= active_set[i - 1]))
                return false;
        for (std::size_t n = 0; n < size(); ++n)
            if (!is_active(n) && std::abs(std::abs(alpha[static_cast<Eigen::Index>(n)]) - 1.0) > tol)
                return false;
        return true;
    }
};

inline void check_dimensions(const ChannelSet& cs, const HrrisState& hs)
{
    if (cs.g.rows() != cs.h_en.size() || cs.g.cols() != cs.h_r.size() || hs.alpha.size() != cs.h_r.size())
        throw std::invalid_argument("channel/surface dimension mismatch");
}

// h = h_EN + G diag(alpha) h_R
inline CVector effective_channel(const ChannelSet& cs, const HrrisState& hs)
{
    check_dimensions(cs, hs);
    return cs.h_en + cs.g * hs.alpha.cwiseProduct(cs.h_r);
}

// Per-element amplifier input power xi_n = sigma^2 + P |h_{H,n}|^2.
inline double amplifier_input_power(const ChannelSet& cs, std::size_t n, double p_user, double sigma2)
{
    return sigma2 + p_user * std::norm(cs.h_r[static_cast<Eigen::Index>(n)]);
}

// Sum over active elements of |alpha_n|^2 xi_n.
inline double active_power(const HrrisState& hs, const ChannelSet& cs, double p_user, double sigma2)
{
    check_dimensions(cs, hs);
    double total = 0.0;
    for (auto n : hs.active_set)
        total += std::norm(hs.alpha[static_cast<Eigen::Index>(n)]) * amplifier_input_power(cs, n, p_user, sigma2);
    return total;
}

// Q = I_M + G Psi Psi^H G^H; the effective noise covariance is sigma^2 Q.
inline CMatrix noise_covariance(const ChannelSet& cs, const HrrisState& hs)
{
    check_dimensions(cs, hs);
    const auto m = cs.h_en.size();
    CMatrix q = CMatrix::Identity(m, m);
    for (auto n : hs.active_set) {
        const auto col = cs.g.col(static_cast<Eigen::Index>(n));
        q += std::norm(hs.alpha[static_cast<Eigen::Index>(n)]) * (col * col.adjoint());
    }
    return q;
}

// gamma = P |w^H h|^2 / (sigma^2 w^H Q w)
inline double sinr(const CVector& w, const HrrisState& hs, const ChannelSet& cs, double p_user, double sigma2)
{
    if (w.size() != cs.h_en.size())
        throw std::invalid_argument("combiner length differs from EN antenna count");
    if (w.squaredNorm() == 0.0)
        throw std::invalid_argument("zero combiner");
    const CVector h = effective_channel(cs, hs);
    const double signal = std::norm(w.dot(h));
    const double noise = (w.adjoint() * noise_covariance(cs, hs) * w)(0, 0).real();
    return p_user * signal / (sigma2 * noise);
}

// W log2(1 + gamma), bits/s
inline double achievable_rate(double gamma, double bandwidth_hz) { return bandwidth_hz * std::log2(1.0 + gamma); }

// Worst-case eavesdropper rate under the relative CSI error bound eps, bits/s.
inline double leakage_bound(const CVector& h_e_est, double eps, double p_user, double sigma2_eve, double bandwidth_hz)
{
    const double margin = (1.0 + eps) * (1.0 + eps);
    return bandwidth_hz * std::log2(1.0 + p_user * margin * h_e_est.squaredNorm() / sigma2_eve);
}

inline double secrecy_rate(double rate_en, double leak) { return std::max(rate_en - leak, 0.0); }

// Edge latency when bits are offloaded over a zero secrecy rate.
inline constexpr double kUnboundedLatency = std::numeric_limits<double>::infinity();

struct Latency {
    double local = 0.0;
    double edge = 0.0;
    double total = 0.0;
};

inline Latency latency(std::int64_t ell, double secrecy_rate_bps, const ComputeParams& cp)
{
    if (ell < 0 || ell > cp.total_bits)
        throw std::out_of_range("offloaded bits outside [0, L]");
    const double nu = static_cast<double>(cp.cycles_per_bit);
    const double bits = static_cast<double>(ell);

    Latency out;
    out.local = static_cast<double>(cp.total_bits - ell) * nu / cp.local_rate;
    if (ell == 0)
        out.edge = 0.0;
    else if (secrecy_rate_bps <= 0.0)
        out.edge = kUnboundedLatency;
    else
        out.edge = bits / secrecy_rate_bps + bits * nu / cp.edge_rate;
    out.total = std::max(out.local, out.edge);
    return out;
}

} // namespace hrris
