#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdiqkd/config.hpp"

namespace mdiqkd {

/// One labeled sub-run of a named reproduction recipe.
struct ScenarioRun {
    std::string label;  ///< e.g. "fig6_midpoint_delta0over3"
    RunConfig config;   ///< fully specified except the output path
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"fig4", "fig5", "fig6", "fig7", "fig8",
                                                "fig9", "fig10", "fig11", "fig12", "fig13"};
    return names;
}

namespace detail {

struct ScenarioDef {
    int scheme;
    std::string preset;
    FlawVariant flaw;
    // empty frac means ideal modulation; frac 1 means delta0
    std::vector<double> delta_fracs;
    std::vector<double> e_ali_overrides;  // empty: preset value
    double dist_stop;
    double dist_step;
};

inline const ScenarioDef& scenario_def(const std::string& base) {
    // Key-rate figures; each odd-numbered companion figure plots the
    // optimal intensities of the run before it, so it resolves identically
    // (the alpha_star CSV column carries that curve).
    static const ScenarioDef fig4{1, "gys", FlawVariant::Original, {}, {0.033, 0.040}, 40, 1};
    static const ScenarioDef fig6{1, "gys", FlawVariant::Original, {3, 5}, {}, 40, 1};
    static const ScenarioDef fig8{1, "upgraded", FlawVariant::Erratum, {1}, {}, 100, 1};
    static const ScenarioDef fig10{2, "gys", FlawVariant::Original, {0, 50, 20, 10}, {}, 300, 2};
    static const ScenarioDef fig12{2, "upgraded-2x", FlawVariant::Erratum, {1}, {}, 300, 2};
    if (base == "fig4" || base == "fig5") return fig4;
    if (base == "fig6" || base == "fig7") return fig6;
    if (base == "fig8" || base == "fig9") return fig8;
    if (base == "fig10" || base == "fig11") return fig10;
    if (base == "fig12" || base == "fig13") return fig12;
    throw std::invalid_argument("unknown scenario '" + base +
                                "' (see the scenarios subcommand)");
}

inline std::string frac_label(double frac) {
    if (frac == 0.0) return "deltazero";
    if (frac == 1.0) return "delta0";
    std::ostringstream ss;
    ss << "delta0over" << frac;
    return ss.str();
}

}  // namespace detail

/// The sub-runs of a named recipe, in a stable order.
inline std::vector<ScenarioRun> scenario_runs(const std::string& name) {
    const detail::ScenarioDef& def = detail::scenario_def(name);
    std::vector<ScenarioRun> runs;
    const Placement placements[2] = {Placement::AtBob, Placement::Midpoint};
    const char* placement_names[2] = {"at-bob", "midpoint"};

    std::vector<double> fracs = def.delta_fracs;
    if (fracs.empty()) fracs.push_back(-1.0);  // ideal modulation marker
    std::vector<double> ealis = def.e_ali_overrides;
    if (ealis.empty()) ealis.push_back(-1.0);  // preset value marker

    for (int pi = 0; pi < 2; ++pi) {
        for (double frac : fracs) {
            for (double eali : ealis) {
                ScenarioRun run;
                RunConfig& c = run.config;
                c.scheme = def.scheme;
                c.placement = placements[pi];
                c.preset = def.preset;
                c.flaw = def.flaw;
                if (frac == 0.0)
                    c.delta_rad = 0.0;
                else if (frac > 0.0)
                    c.delta_frac = frac;
                if (eali >= 0.0) c.e_ali = eali;
                c.dist_start = 0.0;
                c.dist_stop = def.dist_stop;
                c.dist_step = def.dist_step;

                std::ostringstream label;
                label << placement_names[pi];
                if (frac >= 0.0) label << '_' << detail::frac_label(frac);
                if (eali >= 0.0) label << "_eali" << eali;
                run.label = label.str();
                runs.push_back(std::move(run));
            }
        }
    }
    return runs;
}

/// Human-readable listing of every recipe and its resolved parameters.
inline std::string describe_scenarios() {
    std::ostringstream out;
    for (const std::string& name : scenario_names()) {
        out << name << ":\n";
        for (const ScenarioRun& run : scenario_runs(name)) {
            const RunConfig& c = run.config;
            out << "  " << run.label << ": scheme=" << *c.scheme << " placement="
                << (*c.placement == Placement::AtBob ? "at-bob" : "midpoint")
                << " preset=" << *c.preset;
            if (c.delta_rad)
                out << " delta=" << *c.delta_rad;
            else if (c.delta_frac == 1.0)
                out << " delta=delta0";
            else if (c.delta_frac)
                out << " delta=delta0/" << *c.delta_frac;
            else
                out << " delta=0";
            if (c.e_ali) out << " e-ali=" << *c.e_ali;
            out << " flaw="
                << (c.flaw == FlawVariant::Erratum ? "erratum" : "original") << " dist="
                << *c.dist_start << ':' << *c.dist_stop << ':' << *c.dist_step << "\n";
        }
    }
    return out.str();
}

}  // namespace mdiqkd
