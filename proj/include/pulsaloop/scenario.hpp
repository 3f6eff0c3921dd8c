#ifndef PULSALOOP_SCENARIO_HPP
#define PULSALOOP_SCENARIO_HPP

#include <string>

#include "pulsaloop/dispersion.hpp"
#include "pulsaloop/waveform.hpp"
#include "pulsaloop/womersley.hpp"
#include "pulsaloop/wrapped_normal.hpp"

namespace pulsaloop {

/// One experiment: channel, fluid, transport, flow waveform and receiver.
/// Member defaults are the reference setup (R = 50 µm, L = 1 mm, D = 5e-9 m²/s,
/// blood-like fluid, receiver at 0.3 mm with a 0.1 mm window).
struct Scenario {
    std::string label = "scenario";
    std::string waveform_kind = "custom";  ///< preset name the waveform came from
    ChannelGeometry geometry;
    FluidProperties fluid;
    TransportParams transport;
    HarmonicSeries waveform = HarmonicSeries::steady(1e-4);
    ReceiverSpec receiver;
    double regime_factor = 0.1;  ///< "≪" threshold for the regime advisories

    void validate() const {
        geometry.validate();
        fluid.validate();
        transport.validate();
        receiver.validate(geometry.loop_length);
        if (!(regime_factor > 0.0 && regime_factor < 1.0)) {
            throw invalid_parameter("regime factor must lie in (0, 1)");
        }
    }

    /// Copy with the waveform replaced by steady flow at the same ū.
    Scenario steady_equivalent() const {
        Scenario s = *this;
        s.waveform = HarmonicSeries::steady(waveform.mean_velocity(), waveform.frequency());
        s.waveform_kind = "steady";
        return s;
    }
};

}  // namespace pulsaloop

#endif  // PULSALOOP_SCENARIO_HPP
