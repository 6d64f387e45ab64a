#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdiqkd/presets.hpp"
#include "mdiqkd/sweep.hpp"

namespace mdiqkd {

/// Reference phase-modulation error: the principal solution of
/// tan^2(delta/2) = 1e-3, the typical interferometer extinction ratio.
/// "delta-frac k" run configurations mean delta0()/k.
inline double delta0() { return ModulatorModel::from_extinction_ratio(1e-3).delta; }

/// A run request as it arrives from a config file and/or command flags.
/// Optionals left empty fall back to defaults at resolution time
/// (preset "gys", flaw "original", ideal modulator).
struct RunConfig {
    std::optional<int> scheme;  // 1 | 2
    std::optional<Placement> placement;
    std::optional<std::string> preset;

    // phase-error specification; at most one may be set
    std::optional<double> delta_rad;
    std::optional<double> delta_frac;  // delta = delta0()/k
    std::optional<double> eta_ex;

    std::optional<FlawVariant> flaw;

    std::optional<double> dist_start, dist_stop, dist_step;
    std::optional<std::string> out_path;

    // parameter overrides applied after the preset
    std::optional<double> p_dark, eta_det, e_ali, xi, f_ec;

    std::optional<double> fixed_alpha;  // skip the intensity optimization
    std::optional<double> alpha_min, alpha_max;
    std::optional<bool> converter_loss;

    std::optional<std::string> scenario;

    /// Fields set in `other` win.
    void merge_from(const RunConfig& other) {
        auto take = [](auto& dst, const auto& src) {
            if (src) dst = src;
        };
        take(scheme, other.scheme);
        take(placement, other.placement);
        take(preset, other.preset);
        take(delta_rad, other.delta_rad);
        take(delta_frac, other.delta_frac);
        take(eta_ex, other.eta_ex);
        take(flaw, other.flaw);
        take(dist_start, other.dist_start);
        take(dist_stop, other.dist_stop);
        take(dist_step, other.dist_step);
        take(out_path, other.out_path);
        take(p_dark, other.p_dark);
        take(eta_det, other.eta_det);
        take(e_ali, other.e_ali);
        take(xi, other.xi);
        take(f_ec, other.f_ec);
        take(fixed_alpha, other.fixed_alpha);
        take(alpha_min, other.alpha_min);
        take(alpha_max, other.alpha_max);
        take(converter_loss, other.converter_loss);
        take(scenario, other.scenario);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& value, const std::string& context) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(context + ": not a number: '" + value + "'");
    }
    if (pos != value.size())
        throw std::invalid_argument(context + ": trailing junk in number: '" + value + "'");
    return v;
}

inline Placement parse_placement(const std::string& v, const std::string& context) {
    if (v == "at-bob") return Placement::AtBob;
    if (v == "midpoint") return Placement::Midpoint;
    throw std::invalid_argument(context + ": placement must be at-bob|midpoint, got '" + v +
                                "'");
}

inline FlawVariant parse_flaw(const std::string& v, const std::string& context) {
    if (v == "original") return FlawVariant::Original;
    if (v == "erratum") return FlawVariant::Erratum;
    throw std::invalid_argument(context + ": flaw must be original|erratum, got '" + v + "'");
}

inline bool parse_bool(const std::string& v, const std::string& context) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument(context + ": expected boolean, got '" + v + "'");
}

inline void parse_dist(const std::string& v, const std::string& context, RunConfig& cfg) {
    std::istringstream ss(v);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
        throw std::invalid_argument(context + ": dist must be start:stop:step, got '" + v +
                                    "'");
    cfg.dist_start = parse_double(trim(a), context);
    cfg.dist_stop = parse_double(trim(b), context);
    cfg.dist_step = parse_double(trim(c), context);
}

/// Apply one key=value assignment. Shared by the file parser and the CLI.
inline void assign_key(RunConfig& cfg, const std::string& key, const std::string& value,
                       const std::string& context) {
    if (key == "scheme") {
        const double v = parse_double(value, context);
        if (v != 1.0 && v != 2.0)
            throw std::invalid_argument(context + ": scheme must be 1 or 2");
        cfg.scheme = static_cast<int>(v);
    } else if (key == "placement") {
        cfg.placement = parse_placement(value, context);
    } else if (key == "preset") {
        cfg.preset = value;
    } else if (key == "delta") {
        cfg.delta_rad = parse_double(value, context);
    } else if (key == "delta-frac") {
        cfg.delta_frac = parse_double(value, context);
    } else if (key == "eta-ex") {
        cfg.eta_ex = parse_double(value, context);
    } else if (key == "flaw") {
        cfg.flaw = parse_flaw(value, context);
    } else if (key == "dist") {
        parse_dist(value, context, cfg);
    } else if (key == "out") {
        cfg.out_path = value;
    } else if (key == "p-dark") {
        cfg.p_dark = parse_double(value, context);
    } else if (key == "eta-det") {
        cfg.eta_det = parse_double(value, context);
    } else if (key == "e-ali") {
        cfg.e_ali = parse_double(value, context);
    } else if (key == "xi") {
        cfg.xi = parse_double(value, context);
    } else if (key == "f-ec") {
        cfg.f_ec = parse_double(value, context);
    } else if (key == "alpha") {
        cfg.fixed_alpha = parse_double(value, context);
    } else if (key == "alpha-min") {
        cfg.alpha_min = parse_double(value, context);
    } else if (key == "alpha-max") {
        cfg.alpha_max = parse_double(value, context);
    } else if (key == "converter-loss") {
        cfg.converter_loss = parse_bool(value, context);
    } else if (key == "scenario") {
        cfg.scenario = value;
    } else {
        throw std::invalid_argument(context + ": unknown key '" + key + "'");
    }
}

}  // namespace detail

/// Parse a key=value config stream. Lines may be empty, `# comments`, a
/// `[run]` section header, or `key = value`. Unknown keys and malformed
/// lines are rejected with their line number.
inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::string context = "line " + std::to_string(lineno);
        if (t.front() == '[') {
            if (t != "[run]")
                throw std::invalid_argument(context + ": unknown section '" + t + "'");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(context + ": expected key = value, got '" + t + "'");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        detail::assign_key(cfg, key, value, context + ", key '" + key + "'");
    }
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(in);
}

/// All invariant violations of a config, empty when it is runnable.
inline std::vector<std::string> validate(const RunConfig& cfg) {
    std::vector<std::string> problems;
    if (!cfg.scheme) problems.push_back("missing scheme (1 or 2)");
    if (!cfg.placement) problems.push_back("missing placement (at-bob or midpoint)");
    int delta_specs = 0;
    delta_specs += cfg.delta_rad.has_value();
    delta_specs += cfg.delta_frac.has_value();
    delta_specs += cfg.eta_ex.has_value();
    if (delta_specs > 1)
        problems.push_back("delta, delta-frac and eta-ex are mutually exclusive");
    if (cfg.delta_rad && !(*cfg.delta_rad >= 0.0))
        problems.push_back("delta must be >= 0");
    if (cfg.delta_frac && !(*cfg.delta_frac > 0.0))
        problems.push_back("delta-frac must be > 0");
    if (cfg.eta_ex && !(*cfg.eta_ex >= 0.0))
        problems.push_back("eta-ex must be >= 0");
    if (!cfg.dist_start || !cfg.dist_stop || !cfg.dist_step) {
        problems.push_back("missing dist (start:stop:step)");
    } else {
        if (!(*cfg.dist_start >= 0.0)) problems.push_back("dist start must be >= 0");
        if (!(*cfg.dist_stop >= *cfg.dist_start))
            problems.push_back("dist stop must be >= start");
        if (!(*cfg.dist_step > 0.0)) problems.push_back("dist step must be > 0");
    }
    if (cfg.preset) {
        try {
            preset_by_name(*cfg.preset);
        } catch (const std::exception& e) {
            problems.push_back(e.what());
        }
    }
    auto in01 = [&](const std::optional<double>& v, const char* name) {
        if (v && !(*v >= 0.0 && *v <= 1.0))
            problems.push_back(std::string(name) + " must be in [0,1]");
    };
    in01(cfg.p_dark, "p-dark");
    in01(cfg.eta_det, "eta-det");
    in01(cfg.e_ali, "e-ali");
    if (cfg.xi && !(*cfg.xi >= 0.0)) problems.push_back("xi must be >= 0");
    if (cfg.f_ec && !(*cfg.f_ec >= 1.0)) problems.push_back("f-ec must be >= 1");
    if (cfg.fixed_alpha && !(*cfg.fixed_alpha >= 0.0))
        problems.push_back("alpha must be >= 0");
    if (cfg.alpha_min && !(*cfg.alpha_min > 0.0)) problems.push_back("alpha-min must be > 0");
    if (cfg.alpha_min && cfg.alpha_max && !(*cfg.alpha_max > *cfg.alpha_min))
        problems.push_back("alpha-max must exceed alpha-min");
    return problems;
}

/// A config resolved against its preset and defaults, ready to sweep.
struct ResolvedRun {
    SweepSpec spec;
    std::string out_path;
};

inline ResolvedRun resolve(const RunConfig& cfg) {
    const auto problems = validate(cfg);
    if (!problems.empty()) {
        std::string msg = "invalid run configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw std::invalid_argument(msg);
    }

    ResolvedRun run;
    ScenarioParams& base = run.spec.base;
    base.scheme = *cfg.scheme == 1 ? Scheme::I : Scheme::II;
    apply_preset(base, preset_by_name(cfg.preset.value_or("gys")));
    if (cfg.p_dark) base.detector.p_dark = *cfg.p_dark;
    if (cfg.eta_det) base.detector.eta_det = *cfg.eta_det;
    if (cfg.e_ali) base.e_ali = *cfg.e_ali;
    if (cfg.xi) base.link.xi_db_per_km = *cfg.xi;
    if (cfg.f_ec) base.f_ec = *cfg.f_ec;
    if (cfg.converter_loss) base.converter_loss = *cfg.converter_loss;
    base.flaw_variant = cfg.flaw.value_or(FlawVariant::Original);

    if (cfg.delta_rad)
        base.modulator = ModulatorModel::from_phase_error(*cfg.delta_rad);
    else if (cfg.delta_frac)
        base.modulator = ModulatorModel::from_phase_error(delta0() / *cfg.delta_frac);
    else if (cfg.eta_ex)
        base.modulator = ModulatorModel::from_extinction_ratio(*cfg.eta_ex);
    else
        base.modulator = ModulatorModel::ideal();

    run.spec.placement = *cfg.placement;
    for (double d = *cfg.dist_start; d <= *cfg.dist_stop + 1e-9; d += *cfg.dist_step)
        run.spec.distances_km.push_back(d);
    if (cfg.alpha_min) run.spec.search.alpha_min = *cfg.alpha_min;
    if (cfg.alpha_max) run.spec.search.alpha_max = *cfg.alpha_max;
    run.spec.fixed_alpha = cfg.fixed_alpha;
    run.out_path = cfg.out_path.value_or("");
    return run;
}

}  // namespace mdiqkd
