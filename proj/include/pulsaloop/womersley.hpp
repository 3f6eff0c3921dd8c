#ifndef PULSALOOP_WOMERSLEY_HPP
#define PULSALOOP_WOMERSLEY_HPP

/**
 * @file womersley.hpp
 * @brief Axial Womersley velocity field u(r, t) in a rigid cylindrical channel.
 *
 *   u(r, t) = 2ū(1 − r²/R²) + Σ_n ū M_n Re{Ψ_n(r) e^{j(nωt + φ_n)}}
 *
 *   Ψ_n(r) = [J0(α_n) − J0(α_n r/R)] / [J0(α_n) − 2 J1(α_n)/α_n],
 *   α_n = j^{3/2} a_n,  a_n = R √(nω/ν)
 *
 * Ψ_n has unit cross-sectional mean, so averaging u(r, t) over the disc gives
 * back the 1D series velocity u(t).
 */

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "pulsaloop/bessel.hpp"
#include "pulsaloop/error.hpp"
#include "pulsaloop/waveform.hpp"

namespace pulsaloop {

struct ChannelGeometry {
    double radius = 50e-6;       ///< R [m]
    double loop_length = 1e-3;   ///< L [m]

    void validate() const {
        if (!(radius > 0.0) || !std::isfinite(radius)) {
            throw invalid_parameter("channel radius must be positive");
        }
        if (!(loop_length > 0.0) || !std::isfinite(loop_length)) {
            throw invalid_parameter("loop length must be positive");
        }
        if (radius >= loop_length) {
            throw regime_error("channel is not slender: radius " + std::to_string(radius) +
                               " m >= loop length " + std::to_string(loop_length) + " m");
        }
    }
};

struct FluidProperties {
    double density = 1060.0;          ///< ρ [kg/m³]
    double dynamic_viscosity = 3e-3;  ///< μ [Pa·s]

    double kinematic_viscosity() const noexcept { return dynamic_viscosity / density; }

    void validate() const {
        if (!(density > 0.0) || !(dynamic_viscosity > 0.0)) {
            throw invalid_parameter("fluid density and dynamic viscosity must be positive");
        }
    }
};

/// a_n = R √(nω/ν)
inline double womersley_number(const ChannelGeometry& geom, const FluidProperties& fluid, std::size_t n,
                               double omega) {
    if (n < 1 || !(omega > 0.0)) {
        throw invalid_parameter("womersley_number: need n >= 1 and omega > 0");
    }
    return geom.radius * std::sqrt(static_cast<double>(n) * omega / fluid.kinematic_viscosity());
}

/// j^{3/2} on the principal branch, e^{j 3π/4}.
inline const std::complex<double> kJThreeHalves = std::polar(1.0, 0.75 * std::numbers::pi);

/// Below this Womersley number Ψ_n is replaced by its Poiseuille limit 2(1 − ρ²).
inline constexpr double kSmallWomersley = 1.0e-4;

/// Ψ(ρ) for a given Womersley number, ρ = r/R in [0, 1].
inline std::complex<double> womersley_shape(double womersley, double rho) {
    if (womersley < kSmallWomersley) {
        return {2.0 * (1.0 - rho * rho), 0.0};
    }
    const std::complex<double> alpha = kJThreeHalves * womersley;
    const BesselJ01 wall = bessel_j01(alpha);
    const std::complex<double> inner = bessel_j01(alpha * rho).j0;
    return (wall.j0 - inner) / (wall.j0 - 2.0 * wall.j1 / alpha);
}

inline std::complex<double> shape_function(const ChannelGeometry& geom, const FluidProperties& fluid,
                                           std::size_t n, double omega, double r) {
    if (r < 0.0 || r > geom.radius) {
        throw invalid_parameter("shape_function: radius outside [0, R]");
    }
    return womersley_shape(womersley_number(geom, fluid, n, omega), r / geom.radius);
}

/// Reference evaluation of the 3D field; evaluates Bessel series on every call.
inline double axial_velocity_3d(const HarmonicSeries& series, const ChannelGeometry& geom,
                                const FluidProperties& fluid, double r, double t) {
    const double rho = r / geom.radius;
    const double ubar = series.mean_velocity();
    double u = 2.0 * ubar * (1.0 - rho * rho);
    const double omega = series.angular_frequency();
    for (std::size_t n = 1; n <= series.size(); ++n) {
        const std::complex<double> psi = womersley_shape(womersley_number(geom, fluid, n, omega), rho);
        const std::complex<double> rot = std::polar(1.0, series.phase_at(n, t));
        u += ubar * series.harmonic(n).amplitude * (psi * rot).real();
    }
    return u;
}

/**
 * @brief Tabulated Womersley field for the particle simulator.
 *
 * Ψ_n is an even function of ρ, so it is tabulated against s = ρ² on a uniform
 * grid. For low Womersley numbers Ψ_n is nearly linear in s and linear
 * interpolation is close to exact. Time enters only through the per-harmonic
 * rotation e^{jθ_n(t)}; velocity_profile() folds those into a table of u(s) for
 * one instant, after which a particle lookup is a single interpolation.
 */
class WomersleyField {
public:
    static constexpr std::size_t kDefaultTableSize = 4096;

    WomersleyField(const HarmonicSeries& series, const ChannelGeometry& geom, const FluidProperties& fluid,
                   std::size_t table_size = kDefaultTableSize)
        : series_(series), nodes_(table_size) {
        if (table_size < 2) {
            throw invalid_parameter("WomersleyField: table needs at least two nodes");
        }
        const std::size_t harmonics = series.size();
        shapes_.resize(nodes_ * harmonics);
        const double omega = series.angular_frequency();
        for (std::size_t n = 1; n <= harmonics; ++n) {
            const double a_n = womersley_number(geom, fluid, n, omega);
            for (std::size_t i = 0; i < nodes_; ++i) {
                const double s = static_cast<double>(i) / static_cast<double>(nodes_ - 1);
                shapes_[i * harmonics + (n - 1)] = womersley_shape(a_n, std::sqrt(s));
            }
        }
    }

    std::size_t table_size() const noexcept { return nodes_; }
    const HarmonicSeries& series() const noexcept { return series_; }

    /// Fills `profile` with u(s_i, t) at the table nodes.
    void velocity_profile(double t, std::vector<double>& profile) const {
        const std::size_t harmonics = series_.size();
        const double ubar = series_.mean_velocity();
        std::vector<std::complex<double>> rotation(harmonics);
        for (std::size_t n = 1; n <= harmonics; ++n) {
            rotation[n - 1] = ubar * series_.harmonic(n).amplitude * std::polar(1.0, series_.phase_at(n, t));
        }
        profile.resize(nodes_);
        for (std::size_t i = 0; i < nodes_; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(nodes_ - 1);
            double u = 2.0 * ubar * (1.0 - s);
            const std::complex<double>* psi = shapes_.data() + i * harmonics;
            for (std::size_t n = 0; n < harmonics; ++n) {
                u += psi[n].real() * rotation[n].real() - psi[n].imag() * rotation[n].imag();
            }
            profile[i] = u;
        }
    }

    /// Linear interpolation of a velocity_profile() table at s = r²/R² in [0, 1].
    static double interpolate(const std::vector<double>& profile, double s) {
        const double pos = s * static_cast<double>(profile.size() - 1);
        auto i = static_cast<std::size_t>(pos);
        if (i >= profile.size() - 1) {
            i = profile.size() - 2;
        }
        const double w = pos - static_cast<double>(i);
        return profile[i] + w * (profile[i + 1] - profile[i]);
    }

private:
    HarmonicSeries series_;
    std::size_t nodes_;
    std::vector<std::complex<double>> shapes_;  // node-major: shapes_[i * N + (n - 1)]
};

}  // namespace pulsaloop

#endif  // PULSALOOP_WOMERSLEY_HPP
