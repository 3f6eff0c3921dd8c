#ifndef PULSALOOP_TIMESERIES_HPP
#define PULSALOOP_TIMESERIES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pulsaloop/error.hpp"

namespace pulsaloop {

/// Normalized received concentration sampled on a time grid.
struct TimeSeries {
    std::string label;
    std::vector<double> t;
    std::vector<double> value;

    std::size_t size() const noexcept { return t.size(); }

    void validate() const {
        if (t.size() != value.size()) {
            throw invalid_parameter("time series '" + label + "': time and value lengths differ");
        }
        for (std::size_t i = 1; i < t.size(); ++i) {
            if (!(t[i] > t[i - 1])) {
                throw invalid_parameter("time series '" + label + "': grid must be strictly increasing");
            }
        }
    }
};

/// t_i = duration · i / points for i = 1..points, i.e. `points` uniform samples on (0, duration].
inline std::vector<double> uniform_grid(double duration, std::size_t points) {
    if (!(duration > 0.0) || points == 0) {
        throw invalid_parameter("uniform_grid: need a positive duration and at least one point");
    }
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = duration * static_cast<double>(i + 1) / static_cast<double>(points);
    }
    return grid;
}

inline constexpr double kDefaultHorizon = 20.0;
inline constexpr std::size_t kDefaultGridPoints = 2000;

struct ComparisonMetrics {
    double rmse = 0.0;
    double max_abs_error = 0.0;
    double peak_time_delta = 0.0;  ///< argmax time of b minus argmax time of a [s]
    std::size_t grid_points = 0;
};

inline std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

inline void require_same_grid(const TimeSeries& a, const TimeSeries& b) {
    if (a.t.size() != b.t.size()) {
        throw grid_mismatch("series '" + a.label + "' and '" + b.label + "' have different lengths (" +
                            std::to_string(a.t.size()) + " vs " + std::to_string(b.t.size()) + ")");
    }
    for (std::size_t i = 0; i < a.t.size(); ++i) {
        const double scale = std::max({std::abs(a.t[i]), std::abs(b.t[i]), 1e-300});
        if (std::abs(a.t[i] - b.t[i]) > 1e-12 * scale) {
            throw grid_mismatch("series '" + a.label + "' and '" + b.label + "' differ at grid index " +
                                std::to_string(i));
        }
    }
}

inline ComparisonMetrics compare_series(const TimeSeries& a, const TimeSeries& b) {
    require_same_grid(a, b);
    if (a.t.empty()) {
        throw grid_mismatch("compare_series: empty grid");
    }
    ComparisonMetrics m;
    m.grid_points = a.t.size();
    double sq = 0.0;
    for (std::size_t i = 0; i < a.t.size(); ++i) {
        const double e = std::abs(b.value[i] - a.value[i]);
        sq += e * e;
        m.max_abs_error = std::max(m.max_abs_error, e);
    }
    m.rmse = std::sqrt(sq / static_cast<double>(a.t.size()));
    m.peak_time_delta = b.t[argmax(b.value)] - a.t[argmax(a.value)];
    return m;
}

/// Restriction of a series to lo <= t <= hi.
inline TimeSeries window(const TimeSeries& s, double lo, double hi) {
    TimeSeries out;
    out.label = s.label;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        if (s.t[i] >= lo && s.t[i] <= hi) {
            out.t.push_back(s.t[i]);
            out.value.push_back(s.value[i]);
        }
    }
    return out;
}

/// Centered moving average over 2·half_width + 1 samples (shrinking at the ends).
inline TimeSeries moving_average(const TimeSeries& s, std::size_t half_width) {
    TimeSeries out = s;
    const std::size_t n = s.value.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half_width ? i - half_width : 0;
        const std::size_t hi = std::min(n - 1, i + half_width);
        double sum = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) sum += s.value[j];
        out.value[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

/// Time of the global maximum, optionally after smoothing.
inline double peak_time(const TimeSeries& s, std::size_t smoothing_half_width = 0) {
    if (s.t.empty()) {
        throw invalid_parameter("peak_time: empty series");
    }
    const TimeSeries& src = s;
    if (smoothing_half_width == 0) {
        return src.t[argmax(src.value)];
    }
    const TimeSeries sm = moving_average(s, smoothing_half_width);
    return sm.t[argmax(sm.value)];
}

}  // namespace pulsaloop

#endif  // PULSALOOP_TIMESERIES_HPP
