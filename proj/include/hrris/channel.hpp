// SPDX-License-Identifier: Apache-2.0
//
// Quasi-static channel synthesis: distance-based path loss, Rician fading
// around array-response LoS components, and the eavesdropper-channel estimate
// under a bounded relative error.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

#include "hrris/rng.hpp"
#include "hrris/scenario.hpp"

namespace hrris {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct ChannelSet {
    CVector h_en;     // user -> EN, length M
    CVector h_r;      // user -> surface, length N
    CVector h_e_true; // user -> eavesdropper, length E
    CVector h_e_est;  // EN's estimate of h_e_true
    CMatrix g;        // surface -> EN, M x N

    std::size_t m() const { return static_cast<std::size_t>(h_en.size()); }
    std::size_t n() const { return static_cast<std::size_t>(h_r.size()); }
};

// beta0 * (d / 1 m)^(-eta)
inline double path_loss(double d, Db beta0, double eta) { return to_linear(beta0) * std::pow(d, -eta); }

// Half-wavelength ULA; entry m is exp(j*pi*m*sin(angle)).
inline CVector steering_ula(std::size_t count, double angle)
{
    CVector a(static_cast<Eigen::Index>(count));
    const double step = std::numbers::pi * std::sin(angle);
    for (std::size_t m = 0; m < count; ++m)
        a[static_cast<Eigen::Index>(m)] = std::polar(1.0, step * static_cast<double>(m));
    return a;
}

// Half-wavelength UPA, row-major: entry r*cols + c carries the phase
// pi*r*sin(elevation) + pi*c*sin(azimuth)*cos(elevation).
inline CVector steering_upa(std::size_t rows, std::size_t cols, double azimuth, double elevation)
{
    const double row_step = std::numbers::pi * std::sin(elevation);
    const double col_step = std::numbers::pi * std::sin(azimuth) * std::cos(elevation);
    CVector a(static_cast<Eigen::Index>(rows * cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const cplx row = std::polar(1.0, row_step * static_cast<double>(r));
        for (std::size_t c = 0; c < cols; ++c)
            a[static_cast<Eigen::Index>(r * cols + c)] = row * std::polar(1.0, col_step * static_cast<double>(c));
    }
    return a;
}

// sqrt(k/(1+k)) * LoS + sqrt(1/(1+k)) * NLoS with i.i.d. CN(0,1) NLoS entries.
inline CMatrix draw_rician(const CMatrix& los, double kappa, Rng& rng)
{
    double los_weight = 1.0;
    double nlos_weight = 0.0;
    if (std::isfinite(kappa)) {
        los_weight = std::sqrt(kappa / (1.0 + kappa));
        nlos_weight = std::sqrt(1.0 / (1.0 + kappa));
    }
    CMatrix out(los.rows(), los.cols());
    for (Eigen::Index j = 0; j < los.cols(); ++j)
        for (Eigen::Index i = 0; i < los.rows(); ++i)
            out(i, j) = los_weight * los(i, j) + nlos_weight * complex_normal(rng);
    return out;
}

inline CVector draw_rician(const CVector& los, double kappa, Rng& rng)
{
    return draw_rician(CMatrix(los), kappa, rng).col(0);
}

// Angle of `target` seen from a ULA at `origin` whose boresight is +y.
inline double ula_angle(Point origin, Point target) { return std::atan2(target.x - origin.x, target.y - origin.y); }

// Azimuth of `target` seen from a planar array at `origin` whose boresight points at `facing`.
inline double facing_angle(Point origin, Point facing, Point target)
{
    const double bx = facing.x - origin.x;
    const double by = facing.y - origin.y;
    const double dx = target.x - origin.x;
    const double dy = target.y - origin.y;
    return std::atan2(bx * dy - by * dx, bx * dx + by * dy);
}

namespace detail {

inline double clamped_path_loss(const Scenario& s, double d, double eta)
{
    return path_loss(std::max(d, kMinLinkDistance), Db{s.pathloss_ref_db}, eta);
}

// Uniformly distributed direction on the complex unit sphere of dimension n.
inline CVector random_direction(Eigen::Index n, Rng& rng)
{
    CVector v(n);
    do {
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = complex_normal(rng);
    } while (v.norm() == 0.0);
    return v / v.norm();
}

} // namespace detail

// One realization, fully determined by (scenario, seed). The estimate h_e_est
// is drawn from the channel model; the true channel adds an error of uniform
// direction and magnitude rho * eps * |h_e_est| with rho ~ U[0, 1].
inline ChannelSet synthesize_channels(const Scenario& s, std::uint64_t seed)
{
    validate(s);
    Rng fading_en = substream(seed, Substream::fading_user_en);
    Rng fading_r = substream(seed, Substream::fading_user_hrris);
    Rng fading_g = substream(seed, Substream::fading_hrris_en);
    Rng fading_e = substream(seed, Substream::fading_user_eve);
    Rng csi = substream(seed, Substream::csi_error);

    const auto d = link_distances(s);
    const auto& eta = s.pathloss_exponents;
    const auto& kappa = s.rician_factors;
    const auto m = s.m_antennas;
    const auto e = s.e_antennas;
    const auto& shape = s.upa_shape;

    const CVector los_en = steering_ula(m, ula_angle(s.en(), s.user()));
    const CVector los_r = steering_upa(shape.rows, shape.cols, facing_angle(s.surface(), s.en(), s.user()), 0.0);
    const CMatrix los_g = steering_ula(m, ula_angle(s.en(), s.surface())) *
                          steering_upa(shape.rows, shape.cols, facing_angle(s.surface(), s.en(), s.en()), 0.0).adjoint();
    const CVector los_e = steering_ula(e, ula_angle(s.eve(), s.user()));

    ChannelSet cs;
    cs.h_en = std::sqrt(detail::clamped_path_loss(s, d.user_en, eta.user_en)) * draw_rician(los_en, kappa.user_en, fading_en);
    cs.h_r = std::sqrt(detail::clamped_path_loss(s, d.user_hrris, eta.user_hrris)) *
             draw_rician(los_r, kappa.user_hrris, fading_r);
    cs.g = std::sqrt(detail::clamped_path_loss(s, d.hrris_en, eta.hrris_en)) * draw_rician(los_g, kappa.hrris_en, fading_g);
    cs.h_e_est = std::sqrt(detail::clamped_path_loss(s, d.user_eve, eta.user_eve)) *
                 draw_rician(los_e, kappa.user_eve, fading_e);

    const double rho = uniform01(csi);
    const CVector dir = detail::random_direction(cs.h_e_est.size(), csi);
    cs.h_e_true = cs.h_e_est + (rho * s.csi_error_bound * cs.h_e_est.norm()) * dir;
    return cs;
}

} // namespace hrris
