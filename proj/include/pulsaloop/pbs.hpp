#ifndef PULSALOOP_PBS_HPP
#define PULSALOOP_PBS_HPP

/**
 * @file pbs.hpp
 * @brief 3D particle-based simulation of advection-diffusion in a closed
 *        cylindrical loop.
 *
 * Particles start at x = 0, uniform over the cross section. Each step applies
 * Womersley advection at the pre-step radius plus isotropic Gaussian increments
 * of variance 2DΔt (explicit Euler-Maruyama), reflects specularly at the wall
 * and wraps x into [0, L). Random draws come from a Philox stream keyed by the
 * seed and addressed by (particle, attempt, step), so a run is reproducible
 * bit-for-bit regardless of how particles are split between worker threads.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "pulsaloop/error.hpp"
#include "pulsaloop/philox.hpp"
#include "pulsaloop/regime.hpp"
#include "pulsaloop/scenario.hpp"
#include "pulsaloop/timeseries.hpp"
#include "pulsaloop/womersley.hpp"

namespace pulsaloop {

struct PbsConfig {
    std::size_t particles = 500000;
    double timestep = 1e-4;         ///< Δt [s]
    double duration = 20.0;         ///< T_total [s]
    std::uint64_t seed = 1;
    double sample_interval = 0.01;  ///< [s], must be a whole number of steps
    unsigned workers = 1;           ///< 0 = one per hardware thread
    std::string snapshot_path;      ///< if set, final positions are written here as CSV

    std::size_t steps_per_sample() const {
        return static_cast<std::size_t>(std::llround(sample_interval / timestep));
    }
    std::size_t sample_count() const {
        return static_cast<std::size_t>(std::floor(duration / sample_interval + 1e-9));
    }
    std::size_t total_steps() const { return sample_count() * steps_per_sample(); }

    unsigned resolved_workers() const {
        unsigned w = workers == 0 ? std::thread::hardware_concurrency() : workers;
        w = std::max(1u, w);
        return static_cast<unsigned>(std::min<std::size_t>(w, particles));
    }

    void validate() const {
        if (particles < 1) throw invalid_parameter("pbs: particle count must be >= 1");
        if (particles > std::numeric_limits<std::uint32_t>::max()) {
            throw invalid_parameter("pbs: particle count exceeds the 32-bit stream index");
        }
        if (!(timestep > 0.0)) throw invalid_parameter("pbs: timestep must be positive");
        if (!(sample_interval > 0.0)) throw invalid_parameter("pbs: sample interval must be positive");
        if (!(duration >= sample_interval)) {
            throw invalid_parameter("pbs: duration must be at least one sample interval");
        }
        const double ratio = sample_interval / timestep;
        if (std::llround(ratio) < 1 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
            throw invalid_parameter("pbs: sample interval must be a whole multiple of the timestep");
        }
    }
};

/// Structure-of-arrays particle state. x is wrapped into [0, L); `wraps`
/// counts loop traversals so that x + wraps·L is the unwrapped displacement.
struct ParticleEnsemble {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;
    std::vector<std::int64_t> wraps;

    std::size_t size() const noexcept { return x.size(); }
    double radius(std::size_t i) const { return std::hypot(y[i], z[i]); }
    double unwrapped_x(std::size_t i, double loop_length) const {
        return x[i] + static_cast<double>(wraps[i]) * loop_length;
    }
};

/// Philox substream reserved for initial placement; step draws use substreams 0..kMaxResamples at step >= 1.
inline constexpr std::uint64_t kInitStep = 0;
inline constexpr int kMaxResamples = 10;

/// All particles at x = 0, (y, z) uniform on the disc via r = R√U, θ = 2πU'.
inline ParticleEnsemble init_particles(const PbsConfig& config, const ChannelGeometry& geom) {
    config.validate();
    const CounterRng rng(config.seed);
    ParticleEnsemble e;
    const std::size_t n = config.particles;
    e.x.assign(n, 0.0);
    e.y.resize(n);
    e.z.resize(n);
    e.wraps.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto u = rng.uniforms(static_cast<std::uint32_t>(i), 0, kInitStep);
        const double r = geom.radius * std::sqrt(1.0 - u[0]);  // 1 − U in [0, 1) keeps r < R
        const double theta = 2.0 * std::numbers::pi * u[1];
        e.y[i] = r * std::cos(theta);
        e.z[i] = r * std::sin(theta);
    }
    return e;
}

struct WallReflection {
    double y = 0.0;
    double z = 0.0;
    bool inside = true;  ///< false if the single reflection still left the disc
};

/// Specular reflection at the cylinder wall: a point at radius r > R moves to
/// radius 2R − r along the same ray (through the axis if 2R − r < 0).
inline WallReflection reflect_wall(double y, double z, double radius) {
    const double r = std::hypot(y, z);
    if (r <= radius) {
        return {y, z, true};
    }
    const double reflected = 2.0 * radius - r;
    const double scale = reflected / r;
    return {y * scale, z * scale, std::abs(reflected) <= radius};
}

struct StepStats {
    std::uint64_t reflections = 0;
    std::uint64_t resamples = 0;
    std::uint64_t clamps = 0;  ///< particles pinned to the wall after kMaxResamples failed draws

    StepStats& operator+=(const StepStats& o) {
        reflections += o.reflections;
        resamples += o.resamples;
        clamps += o.clamps;
        return *this;
    }
};

inline bool in_receiver(double x, const ReceiverSpec& receiver, double loop_length) {
    const double a = receiver.lower();
    const double b = receiver.upper();
    if (b - a >= loop_length) return true;
    if (a < 0.0) return x >= a + loop_length || x < b;
    if (b > loop_length) return x >= a || x < b - loop_length;
    return x >= a && x < b;
}

/// Number of particles in [x_Rx − Δx/2, x_Rx + Δx/2), taken modulo L.
inline std::size_t count_receiver(const ParticleEnsemble& e, const ReceiverSpec& receiver, double loop_length,
                                  std::size_t begin = 0, std::size_t end = std::numeric_limits<std::size_t>::max()) {
    end = std::min(end, e.size());
    std::size_t count = 0;
    for (std::size_t i = begin; i < end; ++i) {
        count += in_receiver(e.x[i], receiver, loop_length) ? 1 : 0;
    }
    return count;
}

/// Advances particles one Euler-Maruyama step through a tabulated Womersley field.
class ParticleStepper {
public:
    ParticleStepper(const Scenario& scenario, double timestep, std::uint64_t seed)
        : field_(scenario.waveform, scenario.geometry, scenario.fluid),
          rng_(seed),
          radius_(scenario.geometry.radius),
          loop_length_(scenario.geometry.loop_length),
          timestep_(timestep),
          step_sd_(std::sqrt(2.0 * scenario.transport.diffusion * timestep)) {}

    double timestep() const noexcept { return timestep_; }
    double step_sd() const noexcept { return step_sd_; }

    /// Velocity table u(s) for the start of step `step` (1-based), t = (step − 1)Δt.
    void profile_for_step(std::uint64_t step, std::vector<double>& profile) const {
        field_.velocity_profile(static_cast<double>(step - 1) * timestep_, profile);
    }

    void advance(ParticleEnsemble& e, std::size_t begin, std::size_t end, std::uint64_t step,
                 const std::vector<double>& profile, StepStats& stats) const {
        const double inv_r2 = 1.0 / (radius_ * radius_);
        for (std::size_t i = begin; i < end; ++i) {
            const auto stream = static_cast<std::uint32_t>(i);
            const double y0 = e.y[i];
            const double z0 = e.z[i];
            const double s = std::min(1.0, (y0 * y0 + z0 * z0) * inv_r2);
            const double u = WomersleyField::interpolate(profile, s);
            const auto n = rng_.normals(stream, 0, step);

            double x = e.x[i] + u * timestep_ + step_sd_ * n[0];
            double y = y0 + step_sd_ * n[1];
            double z = z0 + step_sd_ * n[2];
            if (y * y + z * z > radius_ * radius_) {
                ++stats.reflections;
                WallReflection w = reflect_wall(y, z, radius_);
                for (int attempt = 1; !w.inside && attempt <= kMaxResamples; ++attempt) {
                    ++stats.resamples;
                    const auto redraw = rng_.normals(stream, static_cast<std::uint32_t>(attempt), step);
                    w = reflect_wall(y0 + step_sd_ * redraw[1], z0 + step_sd_ * redraw[2], radius_);
                }
                if (!w.inside) {
                    ++stats.clamps;
                    const double r = std::hypot(w.y, w.z);
                    w.y *= radius_ / r;
                    w.z *= radius_ / r;
                }
                y = w.y;
                z = w.z;
            }

            const double loops = std::floor(x / loop_length_);
            x -= loops * loop_length_;
            auto wraps = static_cast<std::int64_t>(loops);
            if (x >= loop_length_) {
                x -= loop_length_;
                ++wraps;
            }
            if (x < 0.0) {
                x = 0.0;
            }
            e.x[i] = x;
            e.y[i] = y;
            e.z[i] = z;
            e.wraps[i] += wraps;
        }
    }

    /// Single-threaded step of the whole ensemble.
    void advance(ParticleEnsemble& e, std::uint64_t step, StepStats& stats) const {
        std::vector<double> profile;
        profile_for_step(step, profile);
        advance(e, 0, e.size(), step, profile, stats);
    }

private:
    WomersleyField field_;
    CounterRng rng_;
    double radius_;
    double loop_length_;
    double timestep_;
    double step_sd_;
};

/// Convenience single step from time t = (step − 1)Δt. Rebuilds the velocity
/// table on every call; the run loop uses ParticleStepper directly.
inline StepStats step(ParticleEnsemble& e, const Scenario& scenario, double timestep, std::uint64_t seed,
                      std::uint64_t step_index) {
    StepStats stats;
    ParticleStepper(scenario, timestep, seed).advance(e, step_index, stats);
    return stats;
}

struct PbsManifest {
    std::uint64_t seed = 0;
    std::size_t particles = 0;
    double timestep = 0.0;
    double duration = 0.0;
    double sample_interval = 0.0;
    unsigned workers = 1;
    std::size_t steps = 0;
    double step_sd = 0.0;
    StepStats stats;
    std::size_t containment_violations = 0;
    std::vector<std::size_t> particle_counts;  ///< ensemble size at each sample
    std::vector<std::string> warnings;
    double elapsed_seconds = 0.0;
};

struct PbsResult {
    TimeSeries series;
    PbsManifest manifest;
    ParticleEnsemble final_state;
};

inline void write_snapshot(const ParticleEnsemble& e, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw io_error("cannot open snapshot file '" + path + "'");
    }
    out << "particle_id,x,y,z\n" << std::setprecision(17);
    for (std::size_t i = 0; i < e.size(); ++i) {
        out << i << ',' << e.x[i] << ',' << e.y[i] << ',' << e.z[i] << '\n';
    }
    if (!out) {
        throw io_error("failed writing snapshot file '" + path + "'");
    }
}

/**
 * @brief Full simulation run sampled every `sample_interval`.
 *
 * The ensemble is split into contiguous chunks, one per worker; each worker
 * carries its chunk through every step and records per-sample receiver counts,
 * which are summed afterwards. Integer reduction keeps the result independent
 * of the worker count.
 */
inline PbsResult run_pbs(const Scenario& scenario, const PbsConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    scenario.validate();
    config.validate();
    const RegimeReport regime = regime_check(scenario);
    if (regime.hard_fail()) {
        throw regime_error("pbs: scenario violates a hard regime condition");
    }

    PbsResult result;
    auto& manifest = result.manifest;
    manifest.seed = config.seed;
    manifest.particles = config.particles;
    manifest.timestep = config.timestep;
    manifest.duration = config.duration;
    manifest.sample_interval = config.sample_interval;
    manifest.workers = config.resolved_workers();

    const ParticleStepper stepper(scenario, config.timestep, config.seed);
    manifest.step_sd = stepper.step_sd();
    const double radius = scenario.geometry.radius;
    const double loop = scenario.geometry.loop_length;
    if (stepper.step_sd() > radius / 10.0) {
        manifest.warnings.push_back("diffusive step sqrt(2 D dt) = " + std::to_string(stepper.step_sd()) +
                                    " m exceeds R/10; wall reflections will be frequent");
    }

    ParticleEnsemble ensemble = init_particles(config, scenario.geometry);
    const std::size_t samples = config.sample_count();
    const std::size_t per_sample = config.steps_per_sample();
    manifest.steps = samples * per_sample;

    const unsigned workers = manifest.workers;
    std::vector<std::vector<std::size_t>> counts(workers, std::vector<std::size_t>(samples, 0));
    std::vector<std::size_t> violations(workers, 0);
    std::vector<StepStats> stats(workers);

    auto work = [&](unsigned w) {
        const std::size_t begin = config.particles * w / workers;
        const std::size_t end = config.particles * (w + 1) / workers;
        std::vector<double> profile;
        std::uint64_t step_index = 0;
        for (std::size_t k = 0; k < samples; ++k) {
            for (std::size_t j = 0; j < per_sample; ++j) {
                ++step_index;
                stepper.profile_for_step(step_index, profile);
                stepper.advance(ensemble, begin, end, step_index, profile, stats[w]);
            }
            counts[w][k] = count_receiver(ensemble, scenario.receiver, loop, begin, end);
            for (std::size_t i = begin; i < end; ++i) {
                const bool contained = ensemble.radius(i) <= radius * (1.0 + 1e-12) && ensemble.x[i] >= 0.0 &&
                                       ensemble.x[i] < loop;
                violations[w] += contained ? 0 : 1;
            }
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
    }

    const double p_inf = scenario.receiver.equilibrium_fraction(loop);
    auto& series = result.series;
    series.label = "pbs";
    series.t.resize(samples);
    series.value.resize(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        std::size_t total = 0;
        for (unsigned w = 0; w < workers; ++w) total += counts[w][k];
        series.t[k] = static_cast<double>((k + 1) * per_sample) * config.timestep;
        series.value[k] = static_cast<double>(total) / static_cast<double>(config.particles) / p_inf;
    }
    for (unsigned w = 0; w < workers; ++w) {
        manifest.stats += stats[w];
        manifest.containment_violations += violations[w];
    }
    manifest.particle_counts.assign(samples, ensemble.size());
    if (manifest.stats.clamps > 0) {
        manifest.warnings.push_back(std::to_string(manifest.stats.clamps) +
                                    " particle(s) clamped to the wall after repeated reflection failures");
    }
    if (!config.snapshot_path.empty()) {
        write_snapshot(ensemble, config.snapshot_path);
    }
    result.final_state = std::move(ensemble);
    manifest.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace pulsaloop

#endif  // PULSALOOP_PBS_HPP
