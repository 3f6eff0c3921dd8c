#ifndef PULSALOOP_WAVEFORM_HPP
#define PULSALOOP_WAVEFORM_HPP

/**
 * @file waveform.hpp
 * @brief Cross-sectionally averaged pulsatile velocity as a truncated harmonic series.
 *
 *   u(t) = ū (1 + Σ_{n=1..N} M_n cos(n ω t + φ_n)),   ω = 2π f
 *
 * Harmonic n is implicitly the n-th multiple of the fundamental, so two
 * harmonics can never share a frequency.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pulsaloop/error.hpp"

namespace pulsaloop {

struct Harmonic {
    double amplitude = 0.0;  ///< M_n, dimensionless, >= 0
    double phase = 0.0;      ///< φ_n in rad, stored as given
};

class HarmonicSeries {
public:
    /// Past this many cycles the harmonic phase is reduced modulo 2π before sin/cos.
    static constexpr double kPhaseReductionCycles = 1.0e4;

    HarmonicSeries(double mean_velocity, double frequency, std::vector<Harmonic> harmonics)
        : mean_velocity_(mean_velocity), frequency_(frequency), harmonics_(std::move(harmonics)) {
        if (!std::isfinite(frequency_) || frequency_ <= 0.0) {
            throw invalid_parameter("waveform frequency must be positive, got " + std::to_string(frequency_));
        }
        if (!std::isfinite(mean_velocity_) || mean_velocity_ < 0.0) {
            throw invalid_parameter("mean velocity must be non-negative, got " + std::to_string(mean_velocity_));
        }
        // ū = 0 is only meaningful for quiescent fluid (pure diffusion).
        if (mean_velocity_ == 0.0 && !harmonics_.empty()) {
            throw invalid_parameter("pulsatile series requires a positive mean velocity");
        }
        for (std::size_t i = 0; i < harmonics_.size(); ++i) {
            const auto& h = harmonics_[i];
            if (!std::isfinite(h.amplitude) || !std::isfinite(h.phase) || h.amplitude < 0.0) {
                throw invalid_parameter("harmonic " + std::to_string(i + 1) +
                                        " must have a finite amplitude >= 0 and a finite phase");
            }
        }
    }

    /// Constant flow at ū (N = 0).
    static HarmonicSeries steady(double mean_velocity, double frequency = 1.0) {
        return HarmonicSeries(mean_velocity, frequency, {});
    }

    double mean_velocity() const noexcept { return mean_velocity_; }
    double frequency() const noexcept { return frequency_; }
    double angular_frequency() const noexcept { return 2.0 * std::numbers::pi * frequency_; }
    double period() const noexcept { return 1.0 / frequency_; }
    std::size_t size() const noexcept { return harmonics_.size(); }
    bool is_steady() const noexcept { return harmonics_.empty(); }
    std::span<const Harmonic> harmonics() const noexcept { return harmonics_; }
    const Harmonic& harmonic(std::size_t n) const { return harmonics_.at(n - 1); }

    /// Same shape, different ū.
    HarmonicSeries with_mean_velocity(double mean_velocity) const {
        return HarmonicSeries(mean_velocity, frequency_, harmonics_);
    }

    /// n ω t + φ_n, with n ω t reduced modulo 2π once t exceeds kPhaseReductionCycles periods.
    double phase_at(std::size_t n, double t) const {
        const double cycles = static_cast<double>(n) * frequency_ * t;
        const double phi = harmonics_[n - 1].phase;
        if (std::abs(cycles) <= kPhaseReductionCycles) {
            return static_cast<double>(n) * angular_frequency() * t + phi;
        }
        return 2.0 * std::numbers::pi * (cycles - std::floor(cycles)) + phi;
    }

    /// u(t)/ū.
    double relative_velocity(double t) const {
        double sum = 1.0;
        for (std::size_t n = 1; n <= harmonics_.size(); ++n) {
            sum += harmonics_[n - 1].amplitude * std::cos(phase_at(n, t));
        }
        return sum;
    }

private:
    double mean_velocity_;
    double frequency_;
    std::vector<Harmonic> harmonics_;
};

/// u(t) in m/s.
inline double eval_velocity(const HarmonicSeries& series, double t) {
    return series.mean_velocity() * series.relative_velocity(t);
}

/// ū (1 + A sin(2π f t)), i.e. a single harmonic with M_1 = A and φ_1 = −π/2.
inline HarmonicSeries make_sinusoidal(double mean_velocity, double amplitude, double frequency) {
    if (!(mean_velocity > 0.0)) {
        throw invalid_parameter("sinusoidal waveform: mean velocity must be positive");
    }
    if (!(frequency > 0.0)) {
        throw invalid_parameter("sinusoidal waveform: frequency must be positive");
    }
    if (!(amplitude >= 0.0)) {
        throw invalid_parameter("sinusoidal waveform: amplitude must be non-negative");
    }
    return HarmonicSeries(mean_velocity, frequency, {Harmonic{amplitude, -std::numbers::pi / 2.0}});
}

inline constexpr std::size_t kDefaultPulsedHarmonics = 50;

/// Ideal rectangular pulse of duty cycle d and temporal mean ū: ū/d on [0, dT), 0 elsewhere.
inline double rectangular_pulse(double mean_velocity, double duty_cycle, double frequency, double t) {
    const double period = 1.0 / frequency;
    double phase = std::fmod(t, period);
    if (phase < 0.0) {
        phase += period;
    }
    return phase < duty_cycle * period ? mean_velocity / duty_cycle : 0.0;
}

/**
 * @brief N-harmonic Fourier fit of the rectangular pulse.
 *
 *   A_n = sin(2πnd)/(πnd),  B_n = (1 − cos(2πnd))/(πnd),
 *   M_n = √(A_n² + B_n²),   φ_n = atan2(−B_n, A_n)
 *
 * The trigonometric arguments are evaluated on the fractional part of n·d so
 * that harmonics with integer n·d vanish exactly.
 */
inline HarmonicSeries make_pulsed(double mean_velocity, double duty_cycle, double frequency,
                                  std::size_t harmonic_count = kDefaultPulsedHarmonics) {
    if (!(duty_cycle > 0.0 && duty_cycle < 1.0)) {
        throw invalid_parameter("pulsed waveform: duty cycle must lie in (0, 1), got " + std::to_string(duty_cycle));
    }
    if (harmonic_count < 1) {
        throw invalid_parameter("pulsed waveform: at least one harmonic is required");
    }
    if (!(mean_velocity > 0.0) || !(frequency > 0.0)) {
        throw invalid_parameter("pulsed waveform: mean velocity and frequency must be positive");
    }
    std::vector<Harmonic> harmonics;
    harmonics.reserve(harmonic_count);
    for (std::size_t n = 1; n <= harmonic_count; ++n) {
        const double nd = static_cast<double>(n) * duty_cycle;
        const double frac = nd - std::round(nd);
        const double angle = 2.0 * std::numbers::pi * frac;
        const double scale = std::numbers::pi * nd;
        const double a = std::sin(angle) / scale;
        const double b = (1.0 - std::cos(angle)) / scale;
        harmonics.push_back({std::hypot(a, b), std::atan2(-b, a)});
    }
    return HarmonicSeries(mean_velocity, frequency, std::move(harmonics));
}

inline constexpr double kPhysiologicalFrequency = 1.15;

inline constexpr std::array<double, 12> kPhysiologicalAmplitudes = {
    0.548, 0.684, 0.373, 0.489, 0.352, 0.166, 0.253, 0.135, 0.195, 0.134, 0.162, 0.190};

inline constexpr std::array<double, 12> kPhysiologicalPhases = {
    -0.869, -1.826, -3.009, 3.137, 1.815, 1.944, 1.252, 0.727, 0.287, -0.504, -0.605, -1.307};

/// 12-harmonic fit of a measured cardiac velocity trace, normalized to mean ū.
inline HarmonicSeries make_physiological(double mean_velocity) {
    if (!(mean_velocity > 0.0)) {
        throw invalid_parameter("physiological waveform: mean velocity must be positive");
    }
    std::vector<Harmonic> harmonics;
    harmonics.reserve(kPhysiologicalAmplitudes.size());
    for (std::size_t i = 0; i < kPhysiologicalAmplitudes.size(); ++i) {
        harmonics.push_back({kPhysiologicalAmplitudes[i], kPhysiologicalPhases[i]});
    }
    return HarmonicSeries(mean_velocity, kPhysiologicalFrequency, std::move(harmonics));
}

/// Minimum of u(t)/ū over one period sampled on a uniform grid.
inline double min_relative_velocity(const HarmonicSeries& series, std::size_t samples = 0) {
    if (series.is_steady()) {
        return 1.0;
    }
    if (samples == 0) {
        samples = std::max<std::size_t>(4096, 64 * series.size());
    }
    double lo = series.relative_velocity(0.0);
    for (std::size_t i = 1; i < samples; ++i) {
        lo = std::min(lo, series.relative_velocity(series.period() * static_cast<double>(i) /
                                                   static_cast<double>(samples)));
    }
    return lo;
}

}  // namespace pulsaloop

#endif  // PULSALOOP_WAVEFORM_HPP
