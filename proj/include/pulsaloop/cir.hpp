#ifndef PULSALOOP_CIR_HPP
#define PULSALOOP_CIR_HPP

/**
 * @file cir.hpp
 * @brief Analytical received signal of the closed loop over a time grid.
 *
 * For every sample: closed-form moments, wrapped-normal mass in the receiver
 * window, divided by the equilibrium fraction Δx_Rx / L.
 */

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pulsaloop/dispersion.hpp"
#include "pulsaloop/scenario.hpp"
#include "pulsaloop/timeseries.hpp"
#include "pulsaloop/wrapped_normal.hpp"

namespace pulsaloop {

inline TimeSeries cir_timeseries(const Scenario& scenario, const std::vector<double>& t_grid,
                                 std::string label = "analytical") {
    TimeSeries out;
    out.label = std::move(label);
    out.t = t_grid;
    out.value.resize(t_grid.size());
    out.validate();
    if (!t_grid.empty() && !(t_grid.front() > 0.0)) {
        throw invalid_parameter("cir_timeseries: grid times must be positive");
    }
    const double loop = scenario.geometry.loop_length;
    const double p_inf = scenario.receiver.equilibrium_fraction(loop);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const GaussianMoments m = closed_form_moments(scenario.waveform, scenario.geometry, scenario.transport, t_grid[i]);
        out.value[i] = received_signal(m, loop, scenario.receiver) / p_inf;
    }
    return out;
}

/// Same pipeline with the waveform replaced by steady flow at ū.
inline TimeSeries steady_flow_reference(const Scenario& scenario, const std::vector<double>& t_grid) {
    return cir_timeseries(scenario.steady_equivalent(), t_grid, "steady");
}

}  // namespace pulsaloop

#endif  // PULSALOOP_CIR_HPP
