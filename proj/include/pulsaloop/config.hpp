#ifndef PULSALOOP_CONFIG_HPP
#define PULSALOOP_CONFIG_HPP

/**
 * @file config.hpp
 * @brief INI scenario files.
 *
 * @code
 * label = sine_f0.5
 *
 * [geometry]
 * radius = 50e-6
 * loop_length = 1e-3
 *
 * [waveform]
 * type = sinusoidal        ; sinusoidal | pulsed | physiological | steady | custom
 * mean_velocity = 1e-4
 * amplitude = 0.5
 * frequency = 0.5
 *
 * [pbs]
 * particles = 50000
 * timestep = 5e-4
 * @endcode
 *
 * Omitted keys take the default channel values. The [waveform] section is
 * mandatory. [pbs] only overrides simulation settings; whether a simulation
 * runs is up to the caller.
 */

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pulsaloop/error.hpp"
#include "pulsaloop/pbs.hpp"
#include "pulsaloop/regime.hpp"
#include "pulsaloop/scenario.hpp"
#include "pulsaloop/timeseries.hpp"

namespace pulsaloop {

struct OutputSettings {
    std::size_t grid_points = kDefaultGridPoints;
    double horizon = kDefaultHorizon;  ///< [s]
};

struct ScenarioConfig {
    Scenario scenario;
    RegimeReport regime;
    PbsConfig pbs;
    OutputSettings output;
};

namespace detail {

using boost::property_tree::ptree;

class Section {
public:
    Section(const ptree* node, std::string name) : node_(node), name_(std::move(name)) {}

    bool present() const noexcept { return node_ != nullptr; }
    const std::string& name() const noexcept { return name_; }
    std::string path(std::string_view key) const { return name_ + "." + std::string(key); }

    bool has(std::string_view key) const {
        return node_ != nullptr && node_->find(std::string(key)) != node_->not_found();
    }

    std::optional<std::string> raw(std::string_view key) const {
        if (!has(key)) return std::nullopt;
        std::string value = node_->find(std::string(key))->second.data();
        value = value.substr(0, value.find_first_of(";#"));  // inline comment
        return trim(value);
    }

    double number(std::string_view key, double fallback) const {
        const auto text = raw(key);
        return text ? parse_double(*text, path(key)) : fallback;
    }

    template <class Int>
    Int integer(std::string_view key, Int fallback) const {
        const auto text = raw(key);
        if (!text) return fallback;
        Int v{};
        const auto* end = text->data() + text->size();
        const auto res = std::from_chars(text->data(), end, v);
        if (res.ec != std::errc{} || res.ptr != end) {
            throw config_error(path(key) + ": expected a non-negative integer, got '" + *text + "'");
        }
        return v;
    }

    std::string text(std::string_view key, std::string fallback) const {
        const auto v = raw(key);
        return v ? *v : fallback;
    }

    std::vector<double> numbers(std::string_view key) const {
        std::vector<double> out;
        const auto text = raw(key);
        if (!text) return out;
        std::string item;
        std::istringstream in(*text);
        while (std::getline(in, item, ',')) {
            std::istringstream words(item);
            std::string w;
            while (words >> w) out.push_back(parse_double(w, path(key)));
        }
        return out;
    }

    void reject_unknown(const std::set<std::string, std::less<>>& allowed) const {
        if (node_ == nullptr) return;
        for (const auto& [key, child] : *node_) {
            if (!allowed.contains(key)) {
                throw config_error(path(key) + ": unknown key");
            }
        }
    }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static double parse_double(const std::string& text, const std::string& where) {
        double v = 0.0;
        const auto* end = text.data() + text.size();
        const auto res = std::from_chars(text.data(), end, v);
        if (res.ec != std::errc{} || res.ptr != end) {
            throw config_error(where + ": expected a number, got '" + text + "'");
        }
        return v;
    }

private:
    const ptree* node_;
    std::string name_;
};

inline HarmonicSeries parse_waveform(const Section& w, std::string& kind) {
    if (!w.present()) {
        throw config_error("waveform: section is required (type = sinusoidal | pulsed | physiological | steady | custom)");
    }
    if (!w.has("type")) {
        throw config_error("waveform.type: missing");
    }
    kind = w.text("type", "");
    const double ubar = w.number("mean_velocity", 1e-4);
    if (kind == "sinusoidal") {
        w.reject_unknown({"type", "mean_velocity", "amplitude", "frequency"});
        return make_sinusoidal(ubar, w.number("amplitude", 0.5), w.number("frequency", 0.5));
    }
    if (kind == "pulsed") {
        w.reject_unknown({"type", "mean_velocity", "duty_cycle", "frequency", "harmonics"});
        return make_pulsed(ubar, w.number("duty_cycle", 0.2), w.number("frequency", 0.5),
                           w.integer<std::size_t>("harmonics", kDefaultPulsedHarmonics));
    }
    if (kind == "physiological") {
        w.reject_unknown({"type", "mean_velocity"});
        return make_physiological(ubar);
    }
    if (kind == "steady") {
        w.reject_unknown({"type", "mean_velocity"});
        return HarmonicSeries::steady(ubar);
    }
    if (kind == "custom") {
        w.reject_unknown({"type", "mean_velocity", "frequency", "amplitudes", "phases"});
        const auto amps = w.numbers("amplitudes");
        const auto phases = w.numbers("phases");
        if (amps.size() != phases.size()) {
            throw config_error("waveform.phases: " + std::to_string(phases.size()) + " values for " +
                               std::to_string(amps.size()) + " amplitudes");
        }
        std::vector<Harmonic> h;
        for (std::size_t i = 0; i < amps.size(); ++i) h.push_back({amps[i], phases[i]});
        return HarmonicSeries(ubar, w.number("frequency", 1.0), std::move(h));
    }
    throw config_error("waveform.type: unknown waveform '" + kind + "'");
}

}  // namespace detail

/// Parses INI text into a validated scenario with its regime report attached.
/// Throws config_error for malformed or unknown keys and invalid values,
/// regime_error when a dispersive-regime condition hard-fails.
inline ScenarioConfig load_scenario(std::string_view text) {
    using detail::Section;
    boost::property_tree::ptree root;
    try {
        std::istringstream in{std::string(text)};
        boost::property_tree::ini_parser::read_ini(in, root);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw config_error("line " + std::to_string(e.line()) + ": " + e.message());
    }

    const std::set<std::string, std::less<>> sections = {"geometry", "fluid", "transport", "waveform",
                                                          "receiver", "pbs", "output", "regime"};
    ScenarioConfig cfg;
    Scenario& s = cfg.scenario;
    for (const auto& [key, child] : root) {
        if (child.empty() && !child.data().empty()) {
            if (key != "label") throw config_error(key + ": unknown top-level key");
            s.label = Section::trim(child.data());
        } else if (!sections.contains(key)) {
            throw config_error(key + ": unknown section");
        }
    }

    auto section = [&root](const std::string& name) {
        const auto it = root.find(name);
        return Section(it == root.not_found() ? nullptr : &it->second, name);
    };

    try {
        const Section geometry = section("geometry");
        geometry.reject_unknown({"radius", "loop_length"});
        s.geometry.radius = geometry.number("radius", s.geometry.radius);
        s.geometry.loop_length = geometry.number("loop_length", s.geometry.loop_length);

        const Section fluid = section("fluid");
        fluid.reject_unknown({"density", "viscosity"});
        s.fluid.density = fluid.number("density", s.fluid.density);
        s.fluid.dynamic_viscosity = fluid.number("viscosity", s.fluid.dynamic_viscosity);

        const Section transport = section("transport");
        transport.reject_unknown({"diffusion"});
        s.transport.diffusion = transport.number("diffusion", s.transport.diffusion);

        const Section receiver = section("receiver");
        receiver.reject_unknown({"center", "width"});
        s.receiver.center = receiver.number("center", s.receiver.center);
        s.receiver.width = receiver.number("width", s.receiver.width);

        const Section regime = section("regime");
        regime.reject_unknown({"factor"});
        s.regime_factor = regime.number("factor", s.regime_factor);

        const Section output = section("output");
        output.reject_unknown({"grid_points", "horizon"});
        cfg.output.grid_points = output.integer<std::size_t>("grid_points", cfg.output.grid_points);
        cfg.output.horizon = output.number("horizon", cfg.output.horizon);
        if (cfg.output.grid_points == 0) throw config_error("output.grid_points: must be >= 1");
        if (!(cfg.output.horizon > 0.0)) throw config_error("output.horizon: must be positive");

        const Section pbs = section("pbs");
        pbs.reject_unknown({"particles", "timestep", "duration", "seed", "sample_interval", "workers", "snapshot"});
        {
            PbsConfig& p = cfg.pbs;
            p.particles = pbs.integer<std::size_t>("particles", p.particles);
            p.timestep = pbs.number("timestep", p.timestep);
            p.duration = pbs.number("duration", p.duration);
            p.seed = pbs.integer<std::uint64_t>("seed", p.seed);
            p.sample_interval = pbs.number("sample_interval", p.sample_interval);
            p.workers = pbs.integer<unsigned>("workers", p.workers);
            p.snapshot_path = pbs.text("snapshot", "");
            try {
                p.validate();
            } catch (const invalid_parameter& e) {
                throw config_error(e.what());
            }
        }

        s.waveform = detail::parse_waveform(section("waveform"), s.waveform_kind);
        s.validate();
    } catch (const invalid_parameter& e) {
        throw config_error(e.what());
    } catch (const out_of_range& e) {
        throw config_error(e.what());
    }

    cfg.regime = regime_check(s);
    if (cfg.regime.hard_fail()) {
        std::ostringstream msg;
        msg << "regime: hard fail (R/L = " << cfg.regime.ratio_slender << " " << to_string(cfg.regime.slender)
            << ", radial = " << cfg.regime.ratio_radial << " " << to_string(cfg.regime.radial)
            << ", axial = " << cfg.regime.ratio_axial << " " << to_string(cfg.regime.axial) << ")";
        throw regime_error(msg.str());
    }
    return cfg;
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return load_scenario(text.str());
}

}  // namespace pulsaloop

#endif  // PULSALOOP_CONFIG_HPP
