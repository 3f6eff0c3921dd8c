#ifndef PULSALOOP_EXPERIMENT_HPP
#define PULSALOOP_EXPERIMENT_HPP

/**
 * @file experiment.hpp
 * @brief Analytical / steady / particle comparisons and the figure sweeps.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pulsaloop/cir.hpp"
#include "pulsaloop/error.hpp"
#include "pulsaloop/pbs.hpp"
#include "pulsaloop/regime.hpp"
#include "pulsaloop/scenario.hpp"
#include "pulsaloop/timeseries.hpp"

namespace pulsaloop {

/// Moving-average half width used before locating peaks in particle data
/// (±5 samples, i.e. ±50 ms at the default 10 ms cadence).
inline constexpr std::size_t kPeakSmoothing = 5;

/// Time and height of the first arrival peak: the maximum of the (optionally
/// smoothed) series up to `cutoff`, see first_pass_cutoff().
struct PeakInfo {
    double time = 0.0;
    double value = 0.0;
};

inline PeakInfo first_peak(const TimeSeries& s, double cutoff, std::size_t smoothing_half_width = 0) {
    if (s.t.empty()) {
        throw invalid_parameter("first_peak: empty series");
    }
    const TimeSeries sm = smoothing_half_width > 0 ? moving_average(s, smoothing_half_width) : s;
    std::size_t best = 0;
    for (std::size_t i = 0; i < sm.size(); ++i) {
        if (sm.t[i] > cutoff && i > 0) break;
        if (sm.value[i] > sm.value[best]) best = i;
    }
    return {sm.t[best], sm.value[best]};
}

/// Halfway between the mean-flow arrival of the first pass, x_Rx/ū, and of
/// the second, (x_Rx + L)/ū. Infinite when ū = 0.
inline double first_pass_cutoff(const Scenario& s) {
    const double u = s.waveform.mean_velocity();
    if (!(u > 0.0)) return std::numeric_limits<double>::infinity();
    return (s.receiver.center + 0.5 * s.geometry.loop_length) / u;
}

/// Mean over the grid of the binomial standard error of the normalized count,
/// √(p(1 − p)/N_p)/(Δx/L), with p taken from the analytical series.
inline double mean_binomial_se(const TimeSeries& analytical, std::size_t particles, double p_inf) {
    if (analytical.t.empty() || particles == 0) {
        throw invalid_parameter("mean_binomial_se: need a non-empty series and N_p >= 1");
    }
    double sum = 0.0;
    for (double v : analytical.value) {
        const double p = std::clamp(v * p_inf, 0.0, 1.0);
        sum += std::sqrt(p * (1.0 - p) / static_cast<double>(particles)) / p_inf;
    }
    return sum / static_cast<double>(analytical.size());
}

struct ExperimentResult {
    Scenario scenario;
    RegimeReport regime;
    std::vector<TimeSeries> series;                    ///< analytical, steady[, pbs]
    std::map<std::string, ComparisonMetrics> metrics;  ///< keyed "<a>_vs_<b>"
    std::optional<PbsManifest> pbs;
    std::optional<double> binomial_se;

    const TimeSeries& get(const std::string& label) const {
        for (const auto& s : series) {
            if (s.label == label) return s;
        }
        throw invalid_parameter("experiment has no series '" + label + "'");
    }
};

/**
 * @brief Evaluates the analytical and steady models on `t_grid`, plus a
 *        particle run when `pbs` is given.
 *
 * With a particle run the grid is the simulation's sampling grid and
 * `t_grid` is ignored, so all three series share the same sample times.
 */
inline ExperimentResult run_experiment(const Scenario& scenario, const std::optional<PbsConfig>& pbs,
                                       const std::vector<double>& t_grid) {
    scenario.validate();
    ExperimentResult r;
    r.scenario = scenario;
    r.regime = regime_check(scenario);
    if (r.regime.hard_fail()) {
        throw regime_error("scenario '" + scenario.label + "' violates a hard regime condition");
    }

    std::optional<TimeSeries> particles;
    std::vector<double> grid = t_grid;
    if (pbs) {
        PbsResult run = run_pbs(scenario, *pbs);
        grid = run.series.t;
        particles = std::move(run.series);
        r.pbs = std::move(run.manifest);
    }
    r.series.push_back(cir_timeseries(scenario, grid));
    r.series.push_back(steady_flow_reference(scenario, grid));
    r.metrics["analytical_vs_steady"] = compare_series(r.series[0], r.series[1]);
    if (particles) {
        r.series.push_back(std::move(*particles));
        r.metrics["analytical_vs_pbs"] = compare_series(r.series[0], r.series[2]);
        r.binomial_se = mean_binomial_se(r.series[0], pbs->particles,
                                         scenario.receiver.equilibrium_fraction(scenario.geometry.loop_length));
    }
    return r;
}

/// RMSE between "analytical" and "steady" restricted to lo ≤ t ≤ hi.
inline double steady_deviation(const ExperimentResult& r, double lo, double hi) {
    return compare_series(window(r.get("analytical"), lo, hi), window(r.get("steady"), lo, hi)).rmse;
}

// ---- figure recipes --------------------------------------------------------

enum class SweepCheck {
    none,
    steady_rmse_decreasing,  ///< RMSE(analytical, steady) on [2 s, horizon] strictly decreases along the sweep
    peak_amplitude_increasing,
    pbs_agreement,           ///< every cell: RMSE(analytical, pbs) < 3 × mean binomial SE
};

struct SweepCell {
    std::string name;  ///< column-prefix and file stem, e.g. "f0.5"
    Scenario scenario;
};

struct FigureRecipe {
    std::string name;
    std::string description;
    std::vector<SweepCell> cells;
    bool uses_pbs = false;
    std::vector<SweepCheck> checks;
};

/// Desk-scale particle settings: N_p = 5·10⁴, Δt = 5·10⁻⁴ s.
inline PbsConfig desk_scale_pbs(double duration = 10.0, std::uint64_t seed = 1) {
    PbsConfig c;
    c.particles = 50000;
    c.timestep = 5e-4;
    c.duration = duration;
    c.seed = seed;
    return c;
}

/// Full-scale particle settings: N_p = 5·10⁵, Δt = 10⁻⁴ s.
inline PbsConfig full_scale_pbs(double duration = 20.0, std::uint64_t seed = 1) {
    PbsConfig c;
    c.particles = 500000;
    c.timestep = 1e-4;
    c.duration = duration;
    c.seed = seed;
    return c;
}

namespace detail {

inline std::string trim_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline Scenario preset_scenario(const std::string& label, std::string kind, HarmonicSeries series) {
    Scenario s;
    s.label = label;
    s.waveform_kind = std::move(kind);
    s.waveform = std::move(series);
    return s;
}

}  // namespace detail

inline std::vector<FigureRecipe> figure_recipes() {
    using detail::preset_scenario;
    using detail::trim_number;
    std::vector<FigureRecipe> out;

    const std::vector<double> freqs = {0.5, 1.0, 2.0, 4.0, 8.0};
    const std::vector<double> ubars = {0.5e-4, 1e-4, 2e-4};

    FigureRecipe sine_f{"fig_sine_f", "sinusoidal waveform, f in {0.5, 1, 2, 4, 8} Hz, u = 1e-4 m/s", {}, false,
                        {SweepCheck::steady_rmse_decreasing}};
    FigureRecipe pulse_f{"fig_pulse_f", "pulsed waveform (d = 0.2, N = 50), f in {0.5, 1, 2, 4, 8} Hz, u = 1e-4 m/s",
                         {}, false, {SweepCheck::steady_rmse_decreasing}};
    for (double f : freqs) {
        const std::string tag = "f" + trim_number(f);
        sine_f.cells.push_back({tag, preset_scenario("sine_" + tag, "sinusoidal", make_sinusoidal(1e-4, 0.5, f))});
        pulse_f.cells.push_back({tag, preset_scenario("pulse_" + tag, "pulsed", make_pulsed(1e-4, 0.2, f))});
    }

    FigureRecipe sine_u{"fig_sine_ubar", "sinusoidal waveform, u in {0.5, 1, 2}e-4 m/s, f = 0.5 Hz", {}, false,
                        {SweepCheck::peak_amplitude_increasing}};
    FigureRecipe pulse_u{"fig_pulse_ubar", "pulsed waveform (d = 0.2, N = 50), u in {0.5, 1, 2}e-4 m/s, f = 0.5 Hz",
                         {}, false, {SweepCheck::peak_amplitude_increasing}};
    for (double u : ubars) {
        const std::string tag = "u" + trim_number(u);
        sine_u.cells.push_back({tag, preset_scenario("sine_" + tag, "sinusoidal", make_sinusoidal(u, 0.5, 0.5))});
        pulse_u.cells.push_back({tag, preset_scenario("pulse_" + tag, "pulsed", make_pulsed(u, 0.2, 0.5))});
    }

    FigureRecipe pbs_x{"fig_pbs_xrx", "physiological waveform, x_Rx in {0.3, 0.5, 0.7} mm, u = 2e-4 m/s, with PBS",
                       {}, true, {SweepCheck::pbs_agreement}};
    for (double x : {0.3e-3, 0.5e-3, 0.7e-3}) {
        const std::string tag = "x" + trim_number(x * 1e3) + "mm";
        Scenario s = preset_scenario("physio_" + tag, "physiological", make_physiological(2e-4));
        s.receiver.center = x;
        pbs_x.cells.push_back({tag, s});
    }

    FigureRecipe pbs_u{"fig_pbs_ubar", "physiological waveform, u in {0.5, 1, 2}e-4 m/s, x_Rx = 0.3 mm, with PBS", {},
                       true, {SweepCheck::pbs_agreement}};
    for (double u : ubars) {
        const std::string tag = "u" + trim_number(u);
        pbs_u.cells.push_back({tag, preset_scenario("physio_" + tag, "physiological", make_physiological(u))});
    }

    FigureRecipe pbs_d{"fig_pbs_D",
                       "physiological waveform, D in {2.5, 5, 10}e-9 m^2/s, u = 2e-4 m/s, x_Rx = 0.3 mm, with PBS", {},
                       true, {SweepCheck::steady_rmse_decreasing, SweepCheck::pbs_agreement}};
    for (double d : {2.5e-9, 5e-9, 10e-9}) {
        const std::string tag = "D" + trim_number(d);
        Scenario s = preset_scenario("physio_" + tag, "physiological", make_physiological(2e-4));
        s.transport.diffusion = d;
        pbs_d.cells.push_back({tag, s});
    }

    for (auto* r : {&sine_f, &pulse_f, &sine_u, &pulse_u, &pbs_x, &pbs_u, &pbs_d}) out.push_back(std::move(*r));
    return out;
}

inline FigureRecipe find_recipe(const std::string& name) {
    for (auto& r : figure_recipes()) {
        if (r.name == name) return r;
    }
    throw config_error("unknown preset '" + name + "' (see the presets subcommand)");
}

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SweepResult {
    FigureRecipe recipe;
    std::vector<ExperimentResult> cells;
    std::vector<CheckOutcome> checks;
};

/// Runs every cell; cells execute concurrently on up to `workers` threads and
/// each cell's particle run is single-threaded, so the output does not depend
/// on the thread count.
inline SweepResult run_sweep(const FigureRecipe& recipe, const std::vector<double>& t_grid,
                             const std::optional<PbsConfig>& pbs, unsigned workers = 0) {
    SweepResult out;
    out.recipe = recipe;
    out.cells.resize(recipe.cells.size());
    std::optional<PbsConfig> cell_pbs = recipe.uses_pbs ? pbs : std::nullopt;
    if (cell_pbs) cell_pbs->workers = 1;

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    std::size_t next = 0;
    while (next < recipe.cells.size()) {
        std::vector<std::future<ExperimentResult>> batch;
        for (unsigned w = 0; w < workers && next < recipe.cells.size(); ++w, ++next) {
            const Scenario& s = recipe.cells[next].scenario;
            batch.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async,
                                       [&s, &cell_pbs, &t_grid] { return run_experiment(s, cell_pbs, t_grid); }));
        }
        const std::size_t first = next - batch.size();
        for (std::size_t i = 0; i < batch.size(); ++i) out.cells[first + i] = batch[i].get();
    }

    const double horizon = t_grid.empty() ? kDefaultHorizon : t_grid.back();
    for (SweepCheck check : recipe.checks) {
        CheckOutcome c;
        c.passed = true;
        switch (check) {
            case SweepCheck::none:
                continue;
            case SweepCheck::steady_rmse_decreasing: {
                c.name = "steady_rmse_decreasing";
                double prev = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < out.cells.size(); ++i) {
                    const auto& cell = out.cells[i];
                    const double hi = cell.series.front().t.back();
                    const double v = steady_deviation(cell, 2.0, std::min(horizon, hi));
                    c.detail += recipe.cells[i].name + "=" + detail::trim_number(v) + " ";
                    c.passed = c.passed && v < prev;
                    prev = v;
                }
                break;
            }
            case SweepCheck::peak_amplitude_increasing: {
                c.name = "peak_amplitude_increasing";
                double prev = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < out.cells.size(); ++i) {
                    const auto& cell = out.cells[i];
                    const double v = first_peak(cell.get("analytical"), first_pass_cutoff(cell.scenario)).value;
                    c.detail += recipe.cells[i].name + "=" + detail::trim_number(v) + " ";
                    c.passed = c.passed && v > prev;
                    prev = v;
                }
                break;
            }
            case SweepCheck::pbs_agreement: {
                c.name = "pbs_agreement";
                if (!cell_pbs) continue;
                for (std::size_t i = 0; i < out.cells.size(); ++i) {
                    const auto& cell = out.cells[i];
                    if (!cell.binomial_se) {
                        c.detail += recipe.cells[i].name + "=skipped(no pbs) ";
                        continue;
                    }
                    const double ratio = cell.metrics.at("analytical_vs_pbs").rmse / *cell.binomial_se;
                    c.detail += recipe.cells[i].name + "=" + detail::trim_number(ratio) + "xSE ";
                    c.passed = c.passed && ratio < 3.0;
                }
                break;
            }
        }
        out.checks.push_back(std::move(c));
    }
    return out;
}

}  // namespace pulsaloop

#endif  // PULSALOOP_EXPERIMENT_HPP
