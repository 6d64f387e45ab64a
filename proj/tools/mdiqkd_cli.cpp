// Command-line front end: configure a scenario, sweep distances, emit CSV.
//
// Exit status: 0 when at least one distance yields a positive key rate,
// 2 when the sweep completed but no positive rate exists anywhere,
// 1 on configuration or I/O errors.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mdiqkd/mdiqkd.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoKey = 2;

struct CliFlags {
    std::string config_path;
    std::string scheme, placement, preset, flaw, dist, out, scenario;
    double delta = -1, delta_frac = -1, eta_ex = -1;
    double p_dark = -1, eta_det = -1, e_ali = -1, xi = -1, f_ec = -1;
    double alpha = -1, alpha_min = -1, alpha_max = -1;
    bool no_converter_loss = false;
};

mdiqkd::RunConfig config_from_flags(const CLI::App& app, const CliFlags& f) {
    using mdiqkd::detail::assign_key;
    mdiqkd::RunConfig cfg;
    // string-valued flags reuse the config-file key parser
    auto set = [&](const char* flag, const char* key, const std::string& value) {
        if (app.count(flag)) assign_key(cfg, key, value, std::string("flag --") + key);
    };
    auto setd = [&](const char* flag, std::optional<double>& dst, double value) {
        if (app.count(flag)) dst = value;
    };
    set("--scheme", "scheme", f.scheme);
    set("--placement", "placement", f.placement);
    set("--preset", "preset", f.preset);
    set("--flaw", "flaw", f.flaw);
    set("--dist", "dist", f.dist);
    set("--out", "out", f.out);
    set("--scenario", "scenario", f.scenario);
    setd("--delta", cfg.delta_rad, f.delta);
    setd("--delta-frac", cfg.delta_frac, f.delta_frac);
    setd("--eta-ex", cfg.eta_ex, f.eta_ex);
    setd("--p-dark", cfg.p_dark, f.p_dark);
    setd("--eta-det", cfg.eta_det, f.eta_det);
    setd("--e-ali", cfg.e_ali, f.e_ali);
    setd("--xi", cfg.xi, f.xi);
    setd("--f-ec", cfg.f_ec, f.f_ec);
    setd("--alpha", cfg.fixed_alpha, f.alpha);
    setd("--alpha-min", cfg.alpha_min, f.alpha_min);
    setd("--alpha-max", cfg.alpha_max, f.alpha_max);
    if (f.no_converter_loss) cfg.converter_loss = false;
    return cfg;
}

// Runs one resolved config; returns true when any rate is positive.
bool run_one(const mdiqkd::ResolvedRun& run, const std::string& out_path) {
    const mdiqkd::SweepResult result = mdiqkd::sweep(run.spec);
    std::vector<mdiqkd::CurveRecord> records;
    records.reserve(result.points.size());
    for (const auto& p : result.points) records.push_back(mdiqkd::to_record(p));

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    mdiqkd::write_csv(out, records);
    if (!out) throw std::runtime_error("write failed: " + out_path);

    const mdiqkd::RunSummary s = mdiqkd::summarize(records);
    if (result.upper_bound_hits > 0)
        std::cerr << "warning: " << result.upper_bound_hits
                  << " point(s) hit the alpha search upper bound; widen --alpha-max\n";
    if (s.any_positive) {
        std::cout << out_path << ": " << records.size() << " points, cutoff " << s.cutoff_km
                  << " km, peak rate " << s.peak_rate << " at " << s.peak_rate_km << " km\n";
    } else {
        std::cout << out_path << ": " << records.size()
                  << " points, no positive key rate anywhere\n";
    }
    return s.any_positive;
}

std::string scenario_out_path(const std::string& stem, const std::string& label) {
    std::string base = stem;
    const std::string suffix = ".csv";
    if (base.size() >= suffix.size() &&
        base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0)
        base.resize(base.size() - suffix.size());
    return base + "_" + label + ".csv";
}

int cmd_run(const CLI::App& app, const CliFlags& flags) {
    mdiqkd::RunConfig cfg;
    if (!flags.config_path.empty()) cfg = mdiqkd::parse_config_file(flags.config_path);
    cfg.merge_from(config_from_flags(app, flags));

    bool any_positive = false;
    if (cfg.scenario) {
        if (!cfg.out_path) throw std::invalid_argument("--scenario requires --out <stem>");
        for (const mdiqkd::ScenarioRun& sr : mdiqkd::scenario_runs(*cfg.scenario)) {
            mdiqkd::RunConfig merged = sr.config;
            // user overrides win over the recipe, except the recipe's identity
            mdiqkd::RunConfig overrides = cfg;
            overrides.scenario.reset();
            overrides.scheme.reset();
            overrides.placement.reset();
            if (overrides.delta_rad || overrides.delta_frac || overrides.eta_ex) {
                merged.delta_rad.reset();
                merged.delta_frac.reset();
                merged.eta_ex.reset();
            }
            merged.merge_from(overrides);
            const mdiqkd::ResolvedRun run = mdiqkd::resolve(merged);
            any_positive |= run_one(run, scenario_out_path(*cfg.out_path, sr.label));
        }
    } else {
        if (!cfg.out_path) throw std::invalid_argument("missing --out <path>");
        const mdiqkd::ResolvedRun run = mdiqkd::resolve(cfg);
        any_positive = run_one(run, *cfg.out_path);
    }
    return any_positive ? kExitOk : kExitNoKey;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Key-rate curves for phase-encoding MDI-QKD with basis-dependent source flaws"};
    app.require_subcommand(1);

    CliFlags flags;
    CLI::App* run = app.add_subcommand("run", "sweep distances and write a CSV curve");
    run->add_option("--config", flags.config_path, "key=value config file");
    run->add_option("--scheme", flags.scheme, "1 (phase-locked) or 2 (converter)");
    run->add_option("--placement", flags.placement, "at-bob | midpoint");
    run->add_option("--preset", flags.preset, "gys | upgraded | upgraded-2x");
    run->add_option("--delta", flags.delta, "phase modulation error, radians");
    run->add_option("--delta-frac", flags.delta_frac, "k meaning delta0/k");
    run->add_option("--eta-ex", flags.eta_ex, "extinction ratio defining delta");
    run->add_option("--flaw", flags.flaw, "original | erratum");
    run->add_option("--dist", flags.dist, "distance grid start:stop:step, km");
    run->add_option("--out", flags.out, "output CSV path (stem with --scenario)");
    run->add_option("--scenario", flags.scenario, "named recipe, e.g. fig6");
    run->add_option("--p-dark", flags.p_dark, "dark count probability override");
    run->add_option("--eta-det", flags.eta_det, "detector efficiency override");
    run->add_option("--e-ali", flags.e_ali, "alignment error override");
    run->add_option("--xi", flags.xi, "fiber loss dB/km override");
    run->add_option("--f-ec", flags.f_ec, "error-correction inefficiency override");
    run->add_option("--alpha", flags.alpha, "fixed intensity (skips optimization)");
    run->add_option("--alpha-min", flags.alpha_min, "intensity search lower bound");
    run->add_option("--alpha-max", flags.alpha_max, "intensity search upper bound");
    run->add_flag("--no-converter-loss", flags.no_converter_loss,
                  "drop the scheme II 50% conversion loss (polarization encoding)");

    CLI::App* scen = app.add_subcommand("scenarios", "list named reproduction recipes");

    try {
        app.parse(argc, argv);
        if (scen->parsed()) {
            std::cout << mdiqkd::describe_scenarios();
            return kExitOk;
        }
        return cmd_run(*run, flags);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
