#ifndef PULSALOOP_WRAPPED_NORMAL_HPP
#define PULSALOOP_WRAPPED_NORMAL_HPP

/**
 * @file wrapped_normal.hpp
 * @brief Gaussian wrapped onto a loop of length L, and its mass over a window.
 *
 *   p(x, t) = Σ_k N(x − μ + kL; 0, σ²)
 *
 * The image sum is truncated to the k whose images lie within c standard
 * deviations of the evaluation point (or window), plus one guard image on
 * each side. μ is used unreduced; the image index window follows it.
 */

#include <cmath>
#include <numbers>
#include <string>

#include "pulsaloop/dispersion.hpp"
#include "pulsaloop/error.hpp"

namespace pulsaloop {

struct ReceiverSpec {
    double center = 0.3e-3;  ///< x_Rx [m]
    double width = 0.1e-3;   ///< Δx_Rx [m]

    double lower() const noexcept { return center - 0.5 * width; }
    double upper() const noexcept { return center + 0.5 * width; }

    /// Equilibrium fraction p_∞ = Δx_Rx / L.
    double equilibrium_fraction(double loop_length) const noexcept { return width / loop_length; }

    void validate(double loop_length) const {
        if (!(center >= 0.0 && center < loop_length)) {
            throw invalid_parameter("receiver center must lie in [0, L)");
        }
        if (!(width > 0.0 && width <= loop_length)) {
            throw invalid_parameter("receiver width must lie in (0, L]");
        }
    }
};

struct ImageTruncation {
    double tol = 1e-12;   ///< bound on the omitted tail mass
    double sigmas = 8.0;  ///< minimum half-width c of the image window, in σ
};

namespace detail {

/// Half-width c (in σ) such that the two-sided Gaussian tail beyond c is below tol.
inline double image_half_width(const ImageTruncation& trunc) {
    double c = trunc.sigmas;
    while (std::erfc(c / std::numbers::sqrt2) >= trunc.tol && c < 40.0) {
        c += 0.5;
    }
    return c;
}

inline double checked_sigma(const GaussianMoments& m) {
    if (!(m.variance > 0.0)) {
        throw degenerate_distribution("wrapped normal needs positive variance (got " + std::to_string(m.variance) +
                                      " at t = " + std::to_string(m.t) + " s)");
    }
    return std::sqrt(m.variance);
}

/// P(za < Z < zb) for standard normal Z, computed on the side that avoids 1 − 1 cancellation.
inline double normal_interval(double za, double zb) {
    if (za >= 0.0) {
        return 0.5 * (std::erfc(za / std::numbers::sqrt2) - std::erfc(zb / std::numbers::sqrt2));
    }
    if (zb <= 0.0) {
        return 0.5 * (std::erfc(-zb / std::numbers::sqrt2) - std::erfc(-za / std::numbers::sqrt2));
    }
    return 1.0 - 0.5 * (std::erfc(-za / std::numbers::sqrt2) + std::erfc(zb / std::numbers::sqrt2));
}

/// Mass of the wrapped Gaussian on [a, b] with b − a ≤ L.
inline double wrapped_interval_mass(double mean, double sigma, double loop_length, double a, double b, double c) {
    const auto k_lo = static_cast<long long>(std::floor((mean - b - c * sigma) / loop_length)) - 1;
    const auto k_hi = static_cast<long long>(std::ceil((mean - a + c * sigma) / loop_length)) + 1;
    double mass = 0.0;
    for (long long k = k_lo; k <= k_hi; ++k) {
        const double shift = static_cast<double>(k) * loop_length - mean;
        mass += normal_interval((a + shift) / sigma, (b + shift) / sigma);
    }
    return mass;
}

}  // namespace detail

/// Standard normal CDF via the complementary error function.
inline double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Wrapped-normal density [1/m] at x in [0, L).
inline double wrapped_pdf(const GaussianMoments& moments, double loop_length, double x,
                          const ImageTruncation& trunc = {}) {
    const double sigma = detail::checked_sigma(moments);
    const double c = detail::image_half_width(trunc);
    const double mean = moments.mean;
    const auto k_lo = static_cast<long long>(std::floor((mean - x - c * sigma) / loop_length)) - 1;
    const auto k_hi = static_cast<long long>(std::ceil((mean - x + c * sigma) / loop_length)) + 1;
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
    double density = 0.0;
    for (long long k = k_lo; k <= k_hi; ++k) {
        const double z = (x - mean + static_cast<double>(k) * loop_length) / sigma;
        density += std::exp(-0.5 * z * z);
    }
    return norm * density;
}

/// Fraction of the released mass inside the receiver window. Windows that
/// straddle x = 0 or x = L are split at the seam.
inline double received_signal(const GaussianMoments& moments, double loop_length, const ReceiverSpec& receiver,
                              const ImageTruncation& trunc = {}) {
    const double sigma = detail::checked_sigma(moments);
    const double c = detail::image_half_width(trunc);
    double a = receiver.lower();
    double b = receiver.upper();
    if (b - a >= loop_length) {
        return 1.0;
    }
    if (a < 0.0) {
        return detail::wrapped_interval_mass(moments.mean, sigma, loop_length, a + loop_length, loop_length, c) +
               detail::wrapped_interval_mass(moments.mean, sigma, loop_length, 0.0, b, c);
    }
    if (b > loop_length) {
        return detail::wrapped_interval_mass(moments.mean, sigma, loop_length, a, loop_length, c) +
               detail::wrapped_interval_mass(moments.mean, sigma, loop_length, 0.0, b - loop_length, c);
    }
    return detail::wrapped_interval_mass(moments.mean, sigma, loop_length, a, b, c);
}

}  // namespace pulsaloop

#endif  // PULSALOOP_WRAPPED_NORMAL_HPP
