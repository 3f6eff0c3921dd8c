#ifndef PULSALOOP_REGIME_HPP
#define PULSALOOP_REGIME_HPP

/**
 * @file regime.hpp
 * @brief Checks whether a scenario sits in the dispersive regime where the 1D
 *        reduction holds.
 *
 *   slender:  R / L                ≪ 1
 *   radial:   (R²/D) / (L/ū)       ≪ 1   (cross-section homogenizes quickly)
 *   axial:    (L/ū) / (L²/D)       ≪ 1   (shear dispersion dominates)
 *
 * Each ratio is graded pass (≤ factor), advisory (factor < ratio < 1) or
 * fail (≥ 1). Womersley numbers at or above one and instantaneous flow
 * reversal are reported as flags.
 */

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <vector>

#include "pulsaloop/scenario.hpp"

namespace pulsaloop {

enum class Verdict { pass, advisory, fail };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::advisory: return "advisory";
        case Verdict::fail: return "fail";
    }
    return "unknown";
}

inline Verdict grade(double ratio, double factor) {
    if (ratio >= 1.0) return Verdict::fail;
    if (ratio > factor) return Verdict::advisory;
    return Verdict::pass;
}

struct RegimeReport {
    double factor = 0.1;
    double ratio_slender = 0.0;
    double ratio_radial = 0.0;
    double ratio_axial = 0.0;
    Verdict slender = Verdict::pass;
    Verdict radial = Verdict::pass;
    Verdict axial = Verdict::pass;
    std::vector<double> womersley_numbers;  ///< a_1..a_N
    double womersley_max = 0.0;
    bool womersley_high = false;            ///< a_max ≥ 1: outside the low-Womersley closure for D_1D
    double min_relative_velocity = 1.0;     ///< min over one period of u(t)/ū
    bool flow_reversal_detected = false;

    bool hard_fail() const noexcept {
        return slender == Verdict::fail || radial == Verdict::fail || axial == Verdict::fail;
    }
    bool has_advisory() const noexcept {
        return slender == Verdict::advisory || radial == Verdict::advisory || axial == Verdict::advisory ||
               womersley_high || flow_reversal_detected;
    }
};

inline RegimeReport regime_check(const Scenario& scenario) {
    RegimeReport report;
    report.factor = scenario.regime_factor;
    const double r = scenario.geometry.radius;
    const double l = scenario.geometry.loop_length;
    const double d = scenario.transport.diffusion;
    const double ubar = scenario.waveform.mean_velocity();

    report.ratio_slender = r / l;
    // (R²/D)/(L/ū) and (L/ū)/(L²/D), written without dividing by ū so ū = 0 is harmless.
    report.ratio_radial = r * r * ubar / (d * l);
    report.ratio_axial = d / (ubar * l);
    report.slender = grade(report.ratio_slender, report.factor);
    report.radial = grade(report.ratio_radial, report.factor);
    report.axial = ubar > 0.0 ? grade(report.ratio_axial, report.factor) : Verdict::fail;

    const auto& series = scenario.waveform;
    const double omega = series.angular_frequency();
    for (std::size_t n = 1; n <= series.size(); ++n) {
        report.womersley_numbers.push_back(womersley_number(scenario.geometry, scenario.fluid, n, omega));
    }
    if (!report.womersley_numbers.empty()) {
        report.womersley_max = *std::max_element(report.womersley_numbers.begin(), report.womersley_numbers.end());
    }
    report.womersley_high = report.womersley_max >= 1.0;
    report.min_relative_velocity = min_relative_velocity(series);
    report.flow_reversal_detected = report.min_relative_velocity < 0.0;
    return report;
}

}  // namespace pulsaloop

#endif  // PULSALOOP_REGIME_HPP
