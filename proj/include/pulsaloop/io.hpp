#ifndef PULSALOOP_IO_HPP
#define PULSALOOP_IO_HPP

/**
 * @file io.hpp
 * @brief CSV series files and JSON run manifests.
 *
 * CSV layout: header "t_s,<label1>,<label2>,...", then one row per grid point
 * with every value printed to 17 significant digits so that reading the file
 * back reproduces the doubles exactly.
 */

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulsaloop/error.hpp"
#include "pulsaloop/pbs.hpp"
#include "pulsaloop/regime.hpp"
#include "pulsaloop/scenario.hpp"
#include "pulsaloop/timeseries.hpp"

namespace pulsaloop {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(const std::vector<TimeSeries>& set, std::ostream& out) {
    if (set.empty()) {
        throw invalid_parameter("emit_csv: no series to write");
    }
    for (const auto& s : set) {
        s.validate();
        require_same_grid(set.front(), s);
    }
    out << "t_s";
    for (const auto& s : set) out << ',' << s.label;
    out << '\n';
    for (std::size_t i = 0; i < set.front().size(); ++i) {
        out << format_double(set.front().t[i]);
        for (const auto& s : set) out << ',' << format_double(s.value[i]);
        out << '\n';
    }
}

inline void emit_csv(const std::vector<TimeSeries>& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw io_error("cannot open '" + path + "' for writing");
    }
    write_csv(set, out);
    out.flush();
    if (!out) {
        throw io_error("failed writing '" + path + "'");
    }
}

inline std::vector<TimeSeries> parse_csv(std::istream& in, const std::string& source = "<stream>") {
    std::string line;
    if (!std::getline(in, line)) {
        throw io_error(source + ": empty file");
    }
    auto split = [](const std::string& row) {
        std::vector<std::string> cells;
        std::stringstream ss(row);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    const auto header = split(line);
    if (header.empty() || header.front() != "t_s") {
        throw io_error(source + ": header must start with 't_s'");
    }
    std::vector<TimeSeries> set(header.size() - 1);
    for (std::size_t c = 1; c < header.size(); ++c) set[c - 1].label = header[c];

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw io_error(source + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                           " columns, expected " + std::to_string(header.size()));
        }
        std::vector<double> values(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            char* end = nullptr;
            values[c] = std::strtod(cells[c].c_str(), &end);
            if (end == cells[c].c_str() || *end != '\0') {
                throw io_error(source + ": row " + std::to_string(row) + ": bad number '" + cells[c] + "'");
            }
        }
        for (auto& s : set) s.t.push_back(values[0]);
        for (std::size_t c = 1; c < values.size(); ++c) set[c - 1].value.push_back(values[c]);
    }
    return set;
}

inline std::vector<TimeSeries> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open '" + path + "' for reading");
    }
    return parse_csv(in, path);
}

// ---- manifest -------------------------------------------------------------

using nlohmann::ordered_json;

inline ordered_json to_json(const Scenario& s) {
    ordered_json harmonics = ordered_json::array();
    for (const auto& h : s.waveform.harmonics()) {
        harmonics.push_back({{"amplitude", h.amplitude}, {"phase", h.phase}});
    }
    return {
        {"label", s.label},
        {"geometry", {{"radius_m", s.geometry.radius}, {"loop_length_m", s.geometry.loop_length}}},
        {"fluid", {{"density_kg_m3", s.fluid.density}, {"viscosity_pa_s", s.fluid.dynamic_viscosity}}},
        {"transport", {{"diffusion_m2_s", s.transport.diffusion}}},
        {"waveform",
         {{"type", s.waveform_kind},
          {"mean_velocity_m_s", s.waveform.mean_velocity()},
          {"frequency_hz", s.waveform.frequency()},
          {"harmonics", harmonics}}},
        {"receiver", {{"center_m", s.receiver.center}, {"width_m", s.receiver.width}}},
        {"regime_factor", s.regime_factor},
    };
}

inline ordered_json to_json(const RegimeReport& r) {
    auto verdict = [](Verdict v) { return std::string(to_string(v)); };
    return {
        {"factor", r.factor},
        {"slender", {{"ratio", r.ratio_slender}, {"verdict", verdict(r.slender)}}},
        {"radial", {{"ratio", r.ratio_radial}, {"verdict", verdict(r.radial)}}},
        {"axial", {{"ratio", r.ratio_axial}, {"verdict", verdict(r.axial)}}},
        {"womersley_numbers", r.womersley_numbers},
        {"womersley_max", r.womersley_max},
        {"womersley_high", r.womersley_high},
        {"min_relative_velocity", r.min_relative_velocity},
        {"flow_reversal_detected", r.flow_reversal_detected},
        {"hard_fail", r.hard_fail()},
    };
}

inline ordered_json to_json(const PbsConfig& c) {
    return {
        {"particles", c.particles},       {"timestep_s", c.timestep},
        {"duration_s", c.duration},       {"seed", c.seed},
        {"sample_interval_s", c.sample_interval},
    };
}

/// Run statistics without wall-clock fields (those go under "timing").
inline ordered_json to_json(const PbsManifest& m) {
    const bool conserved = std::all_of(m.particle_counts.begin(), m.particle_counts.end(),
                                       [&](std::size_t n) { return n == m.particles; });
    return {
        {"seed", m.seed},
        {"particles", m.particles},
        {"timestep_s", m.timestep},
        {"steps", m.steps},
        {"diffusive_step_m", m.step_sd},
        {"reflections", m.stats.reflections},
        {"resamples", m.stats.resamples},
        {"clamps", m.stats.clamps},
        {"containment_violations", m.containment_violations},
        {"particle_count_conserved", conserved},
        {"warnings", m.warnings},
    };
}

inline ordered_json to_json(const ComparisonMetrics& m) {
    return {{"rmse", m.rmse},
            {"max_abs_error", m.max_abs_error},
            {"peak_time_delta_s", m.peak_time_delta},
            {"grid_points", m.grid_points}};
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void write_json(const ordered_json& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw io_error("cannot open '" + path + "' for writing");
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw io_error("failed writing '" + path + "'");
    }
}

}  // namespace pulsaloop

#endif  // PULSALOOP_IO_HPP
