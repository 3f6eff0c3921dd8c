#ifndef PULSALOOP_DISPERSION_HPP
#define PULSALOOP_DISPERSION_HPP

/**
 * @file dispersion.hpp
 * @brief Time-variant Aris-Taylor transport coefficients and the closed-form
 *        Gaussian moments they induce.
 *
 * In the dispersive regime the cross-sectional average obeys a 1D
 * advection-diffusion equation with velocity u(t) and
 *
 *   D_1D(t) = D + (R²/48D) u(t)²
 *
 * An impulse released at x = 0 stays Gaussian with
 *
 *   μ(t) = ∫₀ᵗ u(s) ds,   σ²(t) = 2 ∫₀ᵗ D_1D(s) ds,
 *
 * both of which have closed forms for a harmonic series. moments_by_quadrature
 * integrates the definitions directly and is kept as an independent check.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "pulsaloop/error.hpp"
#include "pulsaloop/quadrature.hpp"
#include "pulsaloop/waveform.hpp"
#include "pulsaloop/womersley.hpp"

namespace pulsaloop {

struct TransportParams {
    double diffusion = 5e-9;  ///< molecular diffusion coefficient D [m²/s]

    void validate() const {
        if (!(diffusion > 0.0) || !std::isfinite(diffusion)) {
            throw invalid_parameter("diffusion coefficient must be positive");
        }
    }
};

struct GaussianMoments {
    double t = 0.0;         ///< [s]
    double mean = 0.0;      ///< μ [m]
    double variance = 0.0;  ///< σ² [m²]
};

/// D_1D(t) = D + R² u(t)² / (48 D)
inline double effective_diffusion(const HarmonicSeries& series, const ChannelGeometry& geom,
                                  const TransportParams& transport, double t) {
    const double u = eval_velocity(series, t);
    const double r = geom.radius;
    return transport.diffusion + r * r * u * u / (48.0 * transport.diffusion);
}

namespace detail {

/// [sin(k ω t + φ) − sin φ] / (k ω), with the k ω t term routed through the
/// series' phase reduction.
inline double sine_increment(const HarmonicSeries& series, double multiple, double t, double phase) {
    const double omega = series.angular_frequency();
    const double cycles = multiple * series.frequency() * t;
    double arg = multiple * omega * t;
    if (std::abs(cycles) > HarmonicSeries::kPhaseReductionCycles) {
        arg = 2.0 * std::numbers::pi * (cycles - std::floor(cycles));
    }
    return (std::sin(arg + phase) - std::sin(phase)) / (multiple * omega);
}

}  // namespace detail

/// μ(t) = ū [t + Σ (M_n / nω)(sin(nωt + φ_n) − sin φ_n)]
inline double mean_displacement(const HarmonicSeries& series, double t) {
    double bracket = t;
    const auto harmonics = series.harmonics();
    for (std::size_t n = 1; n <= harmonics.size(); ++n) {
        const auto& h = harmonics[n - 1];
        bracket += h.amplitude * detail::sine_increment(series, static_cast<double>(n), t, h.phase);
    }
    return series.mean_velocity() * bracket;
}

/// How the m ≠ n cross terms of the variance are accumulated.
enum class CrossTermSum {
    upper_triangle,  ///< 2 Σ_{m<n} M_m M_n P_{m,n}
    symmetric,       ///< Σ_{m≠n} M_m M_n P_{min,max}, i.e. the full double sum minus its diagonal
};

/**
 * @brief σ²(t) in closed form.
 *
 *   σ²(t) = 2Dt + (R²ū²/24D) [t + 2 Σ M_n S_n + Σ M_n² Q_n + 2 Σ_{m<n} M_m M_n P_{m,n}]
 *
 *   S_n = [sin(nωt + φ_n) − sin φ_n] / (nω)
 *   Q_n = t/2 + [sin(2nωt + 2φ_n) − sin 2φ_n] / (4nω)
 *   P_{m,n} = ½ { [sin((n−m)ωt + φ_n − φ_m) − sin(φ_n − φ_m)] / ((n−m)ω)
 *               + [sin((n+m)ωt + φ_n + φ_m) − sin(φ_n + φ_m)] / ((n+m)ω) }
 */
inline double variance(const HarmonicSeries& series, const ChannelGeometry& geom, const TransportParams& transport,
                       double t, CrossTermSum mode = CrossTermSum::upper_triangle) {
    const auto harmonics = series.harmonics();
    const std::size_t count = harmonics.size();

    double linear = 0.0;
    double diagonal = 0.0;
    for (std::size_t n = 1; n <= count; ++n) {
        const auto& h = harmonics[n - 1];
        const double nd = static_cast<double>(n);
        linear += h.amplitude * detail::sine_increment(series, nd, t, h.phase);
        const double q = 0.5 * t + 0.5 * detail::sine_increment(series, 2.0 * nd, t, 2.0 * h.phase);
        diagonal += h.amplitude * h.amplitude * q;
    }

    auto pair_term = [&](std::size_t m, std::size_t n) {
        const auto& hm = harmonics[m - 1];
        const auto& hn = harmonics[n - 1];
        const double diff = detail::sine_increment(series, static_cast<double>(n - m), t, hn.phase - hm.phase);
        const double sum = detail::sine_increment(series, static_cast<double>(n + m), t, hn.phase + hm.phase);
        return 0.5 * (diff + sum);
    };

    double cross = 0.0;
    if (mode == CrossTermSum::upper_triangle) {
        for (std::size_t n = 2; n <= count; ++n) {
            for (std::size_t m = 1; m < n; ++m) {
                cross += harmonics[m - 1].amplitude * harmonics[n - 1].amplitude * pair_term(m, n);
            }
        }
        cross *= 2.0;
    } else {
        for (std::size_t m = 1; m <= count; ++m) {
            for (std::size_t n = 1; n <= count; ++n) {
                if (m == n) continue;
                cross += harmonics[m - 1].amplitude * harmonics[n - 1].amplitude *
                         pair_term(std::min(m, n), std::max(m, n));
            }
        }
    }

    const double d = transport.diffusion;
    const double ubar = series.mean_velocity();
    const double r = geom.radius;
    const double bracket = t + 2.0 * linear + diagonal + cross;
    return 2.0 * d * t + r * r * ubar * ubar / (24.0 * d) * bracket;
}

inline GaussianMoments closed_form_moments(const HarmonicSeries& series, const ChannelGeometry& geom,
                                           const TransportParams& transport, double t) {
    return {t, mean_displacement(series, t), variance(series, geom, transport, t)};
}

/// Panels per period of the highest harmonic used by the quadrature oracle.
inline constexpr std::size_t kQuadraturePanelsPerPeriod = 8;

/**
 * @brief μ(t) and σ²(t) by adaptive Simpson integration of u(s) and 2 D_1D(s).
 *
 * The panel count is locked to the period of the highest harmonic. The
 * tolerance is 1e-14 times the integrand scale times t for each integral.
 */
inline GaussianMoments moments_by_quadrature(const HarmonicSeries& series, const ChannelGeometry& geom,
                                             const TransportParams& transport, double t) {
    if (t < 0.0) {
        throw invalid_parameter("moments_by_quadrature: t must be non-negative");
    }
    if (t == 0.0) {
        return {0.0, 0.0, 0.0};
    }
    const double ubar = series.mean_velocity();
    double amplitude_sum = 1.0;
    for (const auto& h : series.harmonics()) {
        amplitude_sum += h.amplitude;
    }
    const double u_scale = std::max(ubar * amplitude_sum, 1e-300);
    const double r = geom.radius;
    const double d = transport.diffusion;
    const double d_scale = 2.0 * (d + r * r * u_scale * u_scale / (48.0 * d));

    // u(s) is rebuilt from powers of e^{jωs} rather than one cosine per harmonic,
    // which keeps the oracle off the arithmetic path of the closed forms.
    std::vector<double> weight_re;
    std::vector<double> weight_im;
    for (const auto& h : series.harmonics()) {
        weight_re.push_back(h.amplitude * std::cos(h.phase));
        weight_im.push_back(h.amplitude * std::sin(h.phase));
    }
    const double frequency = series.frequency();
    auto velocity = [&](double s) {
        const double cycles = frequency * s;
        const double angle = 2.0 * std::numbers::pi * (cycles - std::floor(cycles));
        const double step_re = std::cos(angle);
        const double step_im = std::sin(angle);
        double pow_re = 1.0;
        double pow_im = 0.0;
        double rel = 1.0;
        for (std::size_t k = 0; k < weight_re.size(); ++k) {
            const double next_re = pow_re * step_re - pow_im * step_im;
            pow_im = pow_re * step_im + pow_im * step_re;
            pow_re = next_re;
            rel += weight_re[k] * pow_re - weight_im[k] * pow_im;
        }
        return ubar * rel;
    };

    // Integrate the two components normalized to O(1) so one tolerance serves both.
    auto integrand = [&](double s) {
        const double u = velocity(s);
        return std::array<double, 2>{u / u_scale, 2.0 * (d + r * r * u * u / (48.0 * d)) / d_scale};
    };

    quadrature::SimpsonOptions opt;
    const double highest = series.frequency() * static_cast<double>(std::max<std::size_t>(series.size(), 1));
    opt.panels = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(static_cast<double>(kQuadraturePanelsPerPeriod) * highest * t)));
    opt.abs_tol = 1e-14 * t;
    opt.max_depth = 30;
    const auto result = quadrature::adaptive_simpson(integrand, 0.0, t, opt);
    return {t, result[0] * u_scale, result[1] * d_scale};
}

}  // namespace pulsaloop

#endif  // PULSALOOP_DISPERSION_HPP
