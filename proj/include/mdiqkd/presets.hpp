#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mdiqkd/channel.hpp"

namespace mdiqkd {

/// Named experimental parameter set.
struct Preset {
    std::string_view name;
    DetectorModel detector;
    double e_ali;
    double f_ec;
    double xi_db_per_km;
};

/// gys: Gobby-Yuan-Shields fiber experiment parameters.
/// upgraded: current-technology detector/alignment figures.
/// upgraded-2x: upgraded with doubled detector efficiency.
inline const std::array<Preset, 3>& presets() {
    static const std::array<Preset, 3> table{{
        {"gys", {8.5e-7, 0.045}, 0.033, 1.22, 0.21},
        {"upgraded", {1.0e-7, 0.15}, 0.0075, 1.22, 0.21},
        {"upgraded-2x", {1.0e-7, 0.30}, 0.0075, 1.22, 0.21},
    }};
    return table;
}

inline const Preset& preset_by_name(std::string_view name) {
    for (const Preset& p : presets())
        if (p.name == name) return p;
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (known: gys, upgraded, upgraded-2x)");
}

/// Apply a preset's channel/detector figures to scenario parameters.
inline void apply_preset(ScenarioParams& params, const Preset& preset) {
    params.detector = preset.detector;
    params.e_ali = preset.e_ali;
    params.f_ec = preset.f_ec;
    params.link.xi_db_per_km = preset.xi_db_per_km;
}

}  // namespace mdiqkd
