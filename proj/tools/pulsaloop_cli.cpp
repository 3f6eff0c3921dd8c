// pulsaloop: received-signal models for a closed-loop channel with pulsatile flow.
//
//   pulsaloop cir     --config s.ini --out run        analytical + steady baseline
//   pulsaloop pbs     --config s.ini --out run        particle simulation only
//   pulsaloop compare --config s.ini --out run        all three series + metrics
//   pulsaloop sweep   --preset fig_sine_f --out dir   figure data
//   pulsaloop presets
//
// Each run writes <out>.csv and <out>.manifest.json.
//
// Exit codes: 0 ok, 2 configuration or I/O, 3 regime hard fail, 4 assertion
// failed, 5 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pulsaloop/pulsaloop.hpp"

namespace pl = pulsaloop;
using pl::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRegime = 3;
constexpr int kExitAssert = 4;
constexpr int kExitNumerical = 5;

struct Options {
    std::string config;
    std::string out;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> grid_points;
    bool assert_checks = false;
    bool full_scale = false;
    bool no_pbs = false;
    unsigned workers = 0;
};

using Clock = std::chrono::steady_clock;

std::vector<double> output_grid(const pl::ScenarioConfig& cfg, const Options& opt) {
    return pl::uniform_grid(cfg.output.horizon, opt.grid_points.value_or(cfg.output.grid_points));
}

pl::ScenarioConfig load(const Options& opt) {
    if (opt.config.empty()) {
        throw pl::config_error("--config is required");
    }
    pl::ScenarioConfig cfg = pl::load_scenario_file(opt.config);
    if (opt.seed) cfg.pbs.seed = *opt.seed;
    if (opt.workers) cfg.pbs.workers = opt.workers;
    return cfg;
}

ordered_json base_manifest(const std::string& command, const pl::ScenarioConfig& cfg) {
    return {{"tool", "pulsaloop"},
            {"command", command},
            {"scenario", pl::to_json(cfg.scenario)},
            {"regime", pl::to_json(cfg.regime)}};
}

void finish(ordered_json& manifest, const std::vector<pl::TimeSeries>& series, const std::string& out,
            Clock::time_point started) {
    manifest["timing"] = {{"timestamp_utc", pl::utc_timestamp()},
                          {"elapsed_s", std::chrono::duration<double>(Clock::now() - started).count()}};
    pl::emit_csv(series, out + ".csv");
    pl::write_json(manifest, out + ".manifest.json");
    std::cout << "wrote " << out << ".csv and " << out << ".manifest.json\n";
}

void warn_regime(const pl::RegimeReport& r) {
    if (r.has_advisory()) {
        std::cerr << "regime advisory: radial=" << pl::to_string(r.radial) << " axial=" << pl::to_string(r.axial)
                  << " slender=" << pl::to_string(r.slender) << (r.womersley_high ? " womersley>=1" : "")
                  << (r.flow_reversal_detected ? " flow-reversal" : "") << '\n';
    }
}

int cmd_cir(const Options& opt) {
    const auto started = Clock::now();
    const auto cfg = load(opt);
    warn_regime(cfg.regime);
    const auto r = pl::run_experiment(cfg.scenario, std::nullopt, output_grid(cfg, opt));
    ordered_json m = base_manifest("cir", cfg);
    m["metrics"] = {{"analytical_vs_steady", pl::to_json(r.metrics.at("analytical_vs_steady"))}};
    finish(m, r.series, opt.out.empty() ? "cir" : opt.out, started);
    return kExitOk;
}

int cmd_pbs(const Options& opt) {
    const auto started = Clock::now();
    const auto cfg = load(opt);
    warn_regime(cfg.regime);
    const auto run = pl::run_pbs(cfg.scenario, cfg.pbs);
    for (const auto& w : run.manifest.warnings) std::cerr << "warning: " << w << '\n';
    ordered_json m = base_manifest("pbs", cfg);
    m["pbs_config"] = pl::to_json(cfg.pbs);
    m["pbs_run"] = pl::to_json(run.manifest);
    finish(m, {run.series}, opt.out.empty() ? "pbs" : opt.out, started);
    return kExitOk;
}

int cmd_compare(const Options& opt) {
    const auto started = Clock::now();
    const auto cfg = load(opt);
    warn_regime(cfg.regime);
    const auto r = pl::run_experiment(cfg.scenario, cfg.pbs, {});
    for (const auto& w : r.pbs->warnings) std::cerr << "warning: " << w << '\n';

    const auto& vs_pbs = r.metrics.at("analytical_vs_pbs");
    const double cutoff = pl::first_pass_cutoff(cfg.scenario);
    const double t_ana = pl::first_peak(r.get("analytical"), cutoff, pl::kPeakSmoothing).time;
    const double t_pbs = pl::first_peak(r.get("pbs"), cutoff, pl::kPeakSmoothing).time;
    const bool rmse_ok = vs_pbs.rmse < 3.0 * *r.binomial_se;
    const bool peak_ok = std::abs(t_pbs - t_ana) <= 0.05 + 1e-9;

    ordered_json m = base_manifest("compare", cfg);
    m["pbs_config"] = pl::to_json(cfg.pbs);
    m["pbs_run"] = pl::to_json(*r.pbs);
    m["metrics"] = {{"analytical_vs_steady", pl::to_json(r.metrics.at("analytical_vs_steady"))},
                    {"analytical_vs_pbs", pl::to_json(vs_pbs)},
                    {"mean_binomial_se", *r.binomial_se},
                    {"first_peak_time_analytical_s", t_ana},
                    {"first_peak_time_pbs_s", t_pbs}};
    m["checks"] = {{"rmse_below_3se", rmse_ok}, {"first_peak_within_50ms", peak_ok}};
    finish(m, r.series, opt.out.empty() ? "compare" : opt.out, started);

    std::printf("rmse %.4g  (3 x SE = %.4g)  first peak analytical %.3f s, pbs %.3f s\n", vs_pbs.rmse,
                3.0 * *r.binomial_se, t_ana, t_pbs);
    if (opt.assert_checks && !(rmse_ok && peak_ok)) {
        std::cerr << "assertion failed: PBS and analytical series disagree\n";
        return kExitAssert;
    }
    return kExitOk;
}

int cmd_sweep(const Options& opt) {
    const auto started = Clock::now();
    if (opt.preset.empty()) {
        throw pl::config_error("--preset is required (see the presets subcommand)");
    }
    const pl::FigureRecipe recipe = pl::find_recipe(opt.preset);
    const std::size_t points = opt.grid_points.value_or(pl::kDefaultGridPoints);
    std::optional<pl::PbsConfig> pbs;
    if (recipe.uses_pbs && !opt.no_pbs) {
        pbs = opt.full_scale ? pl::full_scale_pbs(pl::kDefaultHorizon) : pl::desk_scale_pbs(pl::kDefaultHorizon);
        if (opt.seed) pbs->seed = *opt.seed;
        pbs->sample_interval = pl::kDefaultHorizon / static_cast<double>(points);
        pbs->validate();
    }
    const auto result = pl::run_sweep(recipe, pl::uniform_grid(pl::kDefaultHorizon, points), pbs, opt.workers);

    std::vector<pl::TimeSeries> columns;
    ordered_json cells = ordered_json::array();
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        const auto& cell = result.cells[i];
        const std::string& name = recipe.cells[i].name;
        for (auto s : cell.series) {
            s.label = name + "_" + s.label;
            columns.push_back(std::move(s));
        }
        ordered_json c = {{"name", name},
                          {"scenario", pl::to_json(cell.scenario)},
                          {"regime", pl::to_json(cell.regime)}};
        for (const auto& [key, metric] : cell.metrics) c["metrics"][key] = pl::to_json(metric);
        if (cell.pbs) c["pbs_run"] = pl::to_json(*cell.pbs);
        if (cell.binomial_se) c["metrics"]["mean_binomial_se"] = *cell.binomial_se;
        cells.push_back(std::move(c));
    }
    ordered_json checks = ordered_json::object();
    bool all_ok = true;
    for (const auto& c : result.checks) {
        checks[c.name] = {{"passed", c.passed}, {"detail", c.detail}};
        all_ok = all_ok && c.passed;
        std::printf("%-28s %s  %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.detail.c_str());
    }

    ordered_json m = {{"tool", "pulsaloop"},
                      {"command", "sweep"},
                      {"preset", recipe.name},
                      {"description", recipe.description}};
    if (pbs) m["pbs_config"] = pl::to_json(*pbs);
    m["cells"] = std::move(cells);
    m["checks"] = std::move(checks);

    std::string out = opt.out.empty() ? "." : opt.out;
    std::filesystem::create_directories(out);
    finish(m, columns, (std::filesystem::path(out) / recipe.name).string(), started);
    if (opt.assert_checks && !all_ok) {
        std::cerr << "assertion failed: " << recipe.name << " sweep checks\n";
        return kExitAssert;
    }
    return kExitOk;
}

int cmd_presets() {
    for (const auto& r : pl::figure_recipes()) {
        std::printf("%-16s %s\n", r.name.c_str(), r.description.c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop molecular channel with pulsatile flow: analytical model, particle simulation, sweeps"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config, "scenario INI file");
        sub->add_option("--out", opt.out, "output path stem (sweep: directory)");
        sub->add_option("--seed", opt.seed, "override the PBS seed");
        sub->add_option("--grid-points", opt.grid_points, "analytical grid points over the horizon")
            ->check(CLI::PositiveNumber);
        sub->add_option("--workers", opt.workers, "worker threads (0 = all cores)");
    };
    auto* cir = app.add_subcommand("cir", "analytical and steady-flow received signal");
    add_common(cir);
    auto* pbs = app.add_subcommand("pbs", "particle-based simulation");
    add_common(pbs);
    auto* compare = app.add_subcommand("compare", "analytical vs steady vs particle simulation");
    add_common(compare);
    compare->add_flag("--assert", opt.assert_checks, "exit 4 unless PBS agrees with the analytical series");
    auto* sweep = app.add_subcommand("sweep", "run a figure recipe");
    add_common(sweep);
    sweep->add_option("--preset", opt.preset, "recipe name (see presets)");
    sweep->add_flag("--assert", opt.assert_checks, "exit 4 if a recipe check fails");
    sweep->add_flag("--full-scale", opt.full_scale, "PBS with N_p = 5e5, dt = 1e-4 s instead of desk scale");
    sweep->add_flag("--no-pbs", opt.no_pbs, "skip particle simulations in PBS recipes");
    auto* presets = app.add_subcommand("presets", "list figure recipes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (cir->parsed()) return cmd_cir(opt);
        if (pbs->parsed()) return cmd_pbs(opt);
        if (compare->parsed()) return cmd_compare(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (presets->parsed()) return cmd_presets();
    } catch (const pl::regime_error& e) {
        std::cerr << "regime error: " << e.what() << '\n';
        return kExitRegime;
    } catch (const pl::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const pl::io_error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const pl::invalid_parameter& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return kExitConfig;
    } catch (const pl::error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
