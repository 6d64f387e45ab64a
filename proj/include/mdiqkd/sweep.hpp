#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mdiqkd/channel.hpp"
#include "mdiqkd/detail/golden.hpp"
#include "mdiqkd/fidelity.hpp"
#include "mdiqkd/security.hpp"

namespace mdiqkd {

/// One row of a key-rate curve.
struct KeyRatePoint {
    double total_distance_km = 0.0;
    double alpha_star = 0.0;  ///< evaluated/optimal intensity; 0 when no key
    double key_rate = 0.0;
    double delta_cap = 0.0;            ///< capped worst-case coin imbalance
    double delta_y_prime_bound = 0.0;  ///< phase-error-rate bound
    double gain = 0.0;                 ///< gamma_suc_x (scheme I) / Q_x (scheme II)
    double qber = 0.0;                 ///< delta_x
};

namespace detail {

inline FlawModel scheme1_flaw(const ScenarioParams& p, double alpha_b) {
    if (p.flaw_variant == FlawVariant::Erratum)
        return {FlawVariant::Erratum,
                delta_ini_erratum(PartySources::coherent(p.alpha_a, p.modulator),
                                  PartySources::coherent(alpha_b, p.modulator))};
    if (p.modulator.delta == 0.0)
        return {FlawVariant::Original, delta_ini_scheme1_original(p.alpha_a, alpha_b)};
    auto fid = [&](double alpha) {
        return fidelity_gram(actual_state_family(alpha, p.modulator, Basis::X),
                             actual_state_family(alpha, p.modulator, Basis::Y));
    };
    return {FlawVariant::Original, delta_ini_actual_states(fid(p.alpha_a), fid(alpha_b))};
}

inline FlawModel scheme2_flaw(const ScenarioParams& p) {
    if (p.flaw_variant == FlawVariant::Erratum) {
        const PartySources s = PartySources::single_photon(p.modulator);
        return {FlawVariant::Erratum, delta_ini_erratum(s, s)};
    }
    const double f1 = qubit_fidelity_scheme2(p.modulator);
    return {FlawVariant::Original, delta_ini_actual_states(f1, f1)};
}

}  // namespace detail

/// Full pipeline for one parameter point: observables -> flaw -> worst-case
/// coin imbalance -> phase-error bound -> key rate.
inline KeyRatePoint evaluate_point(const ScenarioParams& p) {
    p.validate();
    KeyRatePoint out;
    out.total_distance_km = p.link.total_km();
    out.alpha_star = p.alpha_a;
    if (p.scheme == Scheme::I) {
        const Observables1 o = scheme1_observables(p);
        const FlawModel flaw = detail::scheme1_flaw(p, o.alpha_b);
        flaw.validate();
        out.delta_cap = worst_case_delta({flaw.delta_ini, o.gamma_suc, o.delta_y});
        out.delta_y_prime_bound = invert_phase_error_bound(out.delta_cap, o.delta_y);
        out.key_rate = key_rate_scheme1(o.gamma_suc_x, o.delta_x, out.delta_y_prime_bound,
                                        p.f_ec);
        out.gain = o.gamma_suc_x;
        out.qber = o.delta_x;
    } else {
        const Observables2 o = scheme2_observables(p);
        const FlawModel flaw = detail::scheme2_flaw(p);
        flaw.validate();
        out.delta_cap = worst_case_delta({flaw.delta_ini, o.conditional_arrival, o.delta11_y});
        out.delta_y_prime_bound = invert_phase_error_bound(out.delta_cap, o.delta11_y);
        out.key_rate = key_rate_scheme2(o.q11_x, out.delta_y_prime_bound, o.q_x, o.delta_x,
                                        p.f_ec);
        out.gain = o.q_x;
        out.qber = o.delta_x;
    }
    return out;
}

/// Intensity search specification: log-spaced coarse scan over
/// [alpha_min, alpha_max] followed by golden-section refinement.
struct AlphaSearch {
    double alpha_min = 1e-7;
    double alpha_max = 1.0;
    int coarse_points = 200;
    double rel_width = 1e-4;

    void validate() const {
        if (!(alpha_min > 0.0) || !(alpha_max > alpha_min))
            throw std::invalid_argument("AlphaSearch: bounds must satisfy 0 < min < max");
        if (coarse_points < 2)
            throw std::invalid_argument("AlphaSearch: need at least 2 coarse points");
    }
};

struct OptimizeResult {
    double alpha_star = 0.0;  ///< 0 sentinel when no intensity yields a key
    KeyRatePoint point;
    bool hit_upper_bound = false;  ///< optimum at the top of the interval
};

/// Per-distance intensity optimization. When no grid point yields a positive
/// rate, returns the 0 sentinel with the diagnostics of the grid point whose
/// phase-error bound came closest to allowing a key.
inline OptimizeResult optimize_alpha(const ScenarioParams& base, const AlphaSearch& s = {}) {
    s.validate();
    ScenarioParams p = base;
    auto eval = [&](double alpha) {
        p.alpha_a = alpha;
        return evaluate_point(p);
    };

    const double log_lo = std::log(s.alpha_min);
    const double log_hi = std::log(s.alpha_max);
    const int n = s.coarse_points;
    int best_idx = 0;
    KeyRatePoint best_point;
    bool have_best = false;
    for (int k = 0; k < n; ++k) {
        const double alpha = std::exp(log_lo + (log_hi - log_lo) * k / (n - 1));
        const KeyRatePoint pt = eval(alpha);
        const bool better =
            !have_best || pt.key_rate > best_point.key_rate ||
            (pt.key_rate == best_point.key_rate && best_point.key_rate == 0.0 &&
             pt.delta_y_prime_bound < best_point.delta_y_prime_bound);
        if (better) {
            best_idx = k;
            best_point = pt;
            have_best = true;
        }
    }

    OptimizeResult res;
    if (best_point.key_rate <= 0.0) {
        res.point = best_point;
        res.point.alpha_star = 0.0;
        res.point.key_rate = 0.0;
        return res;
    }

    const double spacing = (log_hi - log_lo) / (n - 1);
    const double lo = log_lo + spacing * std::max(best_idx - 1, 0);
    const double hi = log_lo + spacing * std::min(best_idx + 1, n - 1);
    auto rate_of_log = [&](double t) { return eval(std::exp(t)).key_rate; };
    auto [log_star, rate] = detail::golden_max(rate_of_log, lo, hi, s.rel_width);
    (void)rate;

    res.alpha_star = std::exp(log_star);
    res.point = eval(res.alpha_star);
    res.hit_upper_bound = best_idx == n - 1 ||
                          res.alpha_star >= s.alpha_max * (1.0 - 2.0 * s.rel_width);
    return res;
}

/// Distance sweep specification. `base.link` is overridden per grid point
/// from `placement`; a fixed alpha disables the per-distance optimization.
struct SweepSpec {
    ScenarioParams base;
    Placement placement = Placement::AtBob;
    std::vector<double> distances_km;
    AlphaSearch search;
    std::optional<double> fixed_alpha;

    void validate() const {
        if (distances_km.empty()) throw std::invalid_argument("SweepSpec: empty distance grid");
        for (size_t i = 1; i < distances_km.size(); ++i)
            if (!(distances_km[i] > distances_km[i - 1]))
                throw std::invalid_argument("SweepSpec: distances must be strictly increasing");
        search.validate();
    }
};

struct SweepResult {
    std::vector<KeyRatePoint> points;
    int upper_bound_hits = 0;  ///< points whose optimum hit the alpha interval top
};

namespace detail {

inline ScenarioParams params_at_distance(const SweepSpec& spec, double distance_km) {
    ScenarioParams p = spec.base;
    p.link = spec.placement == Placement::AtBob
                 ? LinkModel::at_bob(distance_km, spec.base.link.xi_db_per_km)
                 : LinkModel::midpoint(distance_km, spec.base.link.xi_db_per_km);
    return p;
}

inline KeyRatePoint sweep_point(const SweepSpec& spec, double distance_km, int* ub_hits) {
    ScenarioParams p = params_at_distance(spec, distance_km);
    if (spec.fixed_alpha) {
        p.alpha_a = *spec.fixed_alpha;
        KeyRatePoint pt = evaluate_point(p);
        if (pt.key_rate <= 0.0) pt.alpha_star = 0.0;
        return pt;
    }
    const OptimizeResult r = optimize_alpha(p, spec.search);
    if (ub_hits && r.hit_upper_bound) ++*ub_hits;
    return r.point;
}

}  // namespace detail

/// One KeyRatePoint per grid distance; points are independent and the result
/// is a deterministic function of the spec.
inline SweepResult sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult res;
    res.points.reserve(spec.distances_km.size());
    for (const double d : spec.distances_km)
        res.points.push_back(detail::sweep_point(spec, d, &res.upper_bound_hits));
    return res;
}

/// Largest distance with a positive key rate, refined by bisection on the
/// distance to 0.1 km. Throws when the whole sweep is zero.
inline double cutoff_distance(const SweepSpec& spec) {
    const SweepResult res = sweep(spec);
    int last_pos = -1;
    for (size_t i = 0; i < res.points.size(); ++i)
        if (res.points[i].key_rate > 0.0) last_pos = static_cast<int>(i);
    if (last_pos < 0)
        throw std::runtime_error("cutoff_distance: no positive key rate anywhere in sweep");

    auto positive_at = [&](double d) {
        return detail::sweep_point(spec, d, nullptr).key_rate > 0.0;
    };
    double lo = spec.distances_km[static_cast<size_t>(last_pos)];
    double hi;
    if (static_cast<size_t>(last_pos) + 1 < spec.distances_km.size()) {
        hi = spec.distances_km[static_cast<size_t>(last_pos) + 1];
    } else {
        // positive at the end of the grid: expand until the rate dies
        double step = spec.distances_km.size() > 1
                          ? spec.distances_km.back() - spec.distances_km[spec.distances_km.size() - 2]
                          : 1.0;
        hi = lo + step;
        int guard = 0;
        while (positive_at(hi)) {
            lo = hi;
            step *= 2.0;
            hi = lo + step;
            if (++guard > 40)
                throw std::runtime_error("cutoff_distance: rate does not die out");
        }
    }
    while (hi - lo > 0.1) {
        const double mid = 0.5 * (lo + hi);
        (positive_at(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace mdiqkd
