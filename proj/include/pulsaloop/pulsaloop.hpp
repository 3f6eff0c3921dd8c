#ifndef PULSALOOP_PULSALOOP_HPP
#define PULSALOOP_PULSALOOP_HPP

// Umbrella header.

#include "pulsaloop/bessel.hpp"
#include "pulsaloop/cir.hpp"
#include "pulsaloop/config.hpp"
#include "pulsaloop/dispersion.hpp"
#include "pulsaloop/error.hpp"
#include "pulsaloop/experiment.hpp"
#include "pulsaloop/io.hpp"
#include "pulsaloop/pbs.hpp"
#include "pulsaloop/philox.hpp"
#include "pulsaloop/quadrature.hpp"
#include "pulsaloop/regime.hpp"
#include "pulsaloop/scenario.hpp"
#include "pulsaloop/timeseries.hpp"
#include "pulsaloop/waveform.hpp"
#include "pulsaloop/womersley.hpp"
#include "pulsaloop/wrapped_normal.hpp"

#endif  // PULSALOOP_PULSALOOP_HPP
