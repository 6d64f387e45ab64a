#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "mdiqkd/security.hpp"
#include "mdiqkd/states.hpp"

namespace mdiqkd {

enum class Scheme { I, II };
enum class Placement { AtBob, Midpoint };

struct DetectorModel {
    double p_dark = 0.0;   ///< dark count probability per gate
    double eta_det = 1.0;  ///< quantum efficiency

    void validate() const {
        if (!(p_dark >= 0.0 && p_dark <= 1.0))
            throw std::invalid_argument("DetectorModel: p_dark outside [0,1]");
        if (!(eta_det >= 0.0 && eta_det <= 1.0))
            throw std::invalid_argument("DetectorModel: eta_det outside [0,1]");
    }
};

struct LinkModel {
    double xi_db_per_km = 0.21;  ///< fiber loss coefficient
    double l_a_km = 0.0;         ///< Alice -> measurement unit
    double l_b_km = 0.0;         ///< Bob -> measurement unit
    Placement placement = Placement::AtBob;

    static LinkModel at_bob(double total_km, double xi = 0.21) {
        return {xi, total_km, 0.0, Placement::AtBob};
    }
    static LinkModel midpoint(double total_km, double xi = 0.21) {
        return {xi, 0.5 * total_km, 0.5 * total_km, Placement::Midpoint};
    }

    double total_km() const { return l_a_km + l_b_km; }

    void validate() const {
        if (!(xi_db_per_km >= 0.0)) throw std::invalid_argument("LinkModel: xi must be >= 0");
        if (!(l_a_km >= 0.0) || !(l_b_km >= 0.0))
            throw std::invalid_argument("LinkModel: distances must be >= 0");
        if (placement == Placement::AtBob && l_b_km != 0.0)
            throw std::invalid_argument("LinkModel: AtBob placement requires l_b = 0");
        if (placement == Placement::Midpoint && std::abs(l_a_km - l_b_km) > 1e-9)
            throw std::invalid_argument("LinkModel: Midpoint placement requires l_a = l_b");
    }
};

/// Full experiment description for one evaluation point. alpha_a is the mean
/// photon number of Alice's pulse (scheme II: per signal/reference pulse,
/// not their total).
struct ScenarioParams {
    Scheme scheme = Scheme::I;
    DetectorModel detector;
    LinkModel link;
    ModulatorModel modulator;
    double e_ali = 0.0;  ///< baseline alignment error probability
    double f_ec = 1.22;  ///< error-correction inefficiency
    double alpha_a = 0.0;
    FlawVariant flaw_variant = FlawVariant::Original;

    /// Extinction-ratio multiplier inflating the alignment error
    /// (defaults: 16 for scheme I, 4 for scheme II).
    std::optional<double> alignment_inflation;
    /// Scheme II phase-to-polarization conversion succeeds with probability
    /// 1/2; clearing this models polarization encoding instead.
    bool converter_loss = true;

    double effective_e_ali() const {
        const double factor =
            alignment_inflation.value_or(scheme == Scheme::I ? 16.0 : 4.0);
        return e_ali + factor * modulator.eta_ex;
    }

    void validate() const {
        detector.validate();
        link.validate();
        if (!(e_ali >= 0.0 && e_ali <= 1.0))
            throw std::invalid_argument("ScenarioParams: e_ali outside [0,1]");
        if (!(f_ec >= 1.0)) throw std::invalid_argument("ScenarioParams: f_ec must be >= 1");
        if (!(alpha_a >= 0.0) || !std::isfinite(alpha_a))
            throw std::invalid_argument("ScenarioParams: alpha_a must be finite and >= 0");
        if (!(modulator.delta >= 0.0))
            throw std::invalid_argument("ScenarioParams: modulator delta must be >= 0");
    }
};

struct IntensityMatch {
    double eta_a = 0.0;     ///< Alice's overall transmission
    double eta_b = 0.0;     ///< Bob's overall transmission
    double alpha_b = 0.0;   ///< Bob's matched intensity, alpha_a * eta_a / eta_b
    double alpha_in = 0.0;  ///< arriving intensity, alpha_a * eta_a
};

/// Transmissions and matched intensities under alpha_A eta_A = alpha_B eta_B.
/// For scheme II the converter's 50% success is folded into the etas.
inline IntensityMatch intensity_matching(const ScenarioParams& p) {
    const double conv = (p.scheme == Scheme::II && p.converter_loss) ? 0.5 : 1.0;
    const double eta_a =
        p.detector.eta_det * std::pow(10.0, -p.link.xi_db_per_km * p.link.l_a_km / 10.0) * conv;
    const double eta_b =
        p.detector.eta_det * std::pow(10.0, -p.link.xi_db_per_km * p.link.l_b_km / 10.0) * conv;
    if (!(eta_b > 0.0))
        throw std::domain_error("intensity_matching: Bob's transmission is zero");
    return {eta_a, eta_b, p.alpha_a * eta_a / eta_b, p.alpha_a * eta_a};
}

/// Detection statistics of the phase-locked scheme under normal operation.
struct Observables1 {
    double gamma_suc_x = 0.0;  ///< success probability, X-basis pairs
    double gamma_suc = 0.0;    ///< both bases; equals 2*gamma_suc_x by symmetry
    double delta_x = 0.0;
    double delta_y = 0.0;  ///< equals delta_x in this model
    double alpha_in = 0.0;
    double alpha_b = 0.0;
};

/// Core of the phase-locked scheme's statistics; depends on the link only
/// through the arriving intensity.
inline Observables1 scheme1_observables_core(double alpha_in, double p_dark, double e_ali) {
    const double q = 1.0 - p_dark;
    const double silent = std::exp(-2.0 * alpha_in);  // no optical click
    Observables1 o;
    o.alpha_in = alpha_in;
    o.gamma_suc_x = (p_dark + q * (1.0 - silent)) * q + q * silent * p_dark;
    o.gamma_suc = 2.0 * o.gamma_suc_x;
    const double err = e_ali * q * q * (1.0 - silent) + q * silent * p_dark;
    o.delta_x = o.gamma_suc_x > 0.0 ? err / o.gamma_suc_x : 0.0;
    o.delta_y = o.delta_x;
    return o;
}

inline Observables1 scheme1_observables(const ScenarioParams& p) {
    p.validate();
    if (p.scheme != Scheme::I)
        throw std::invalid_argument("scheme1_observables: params are not scheme I");
    const IntensityMatch m = intensity_matching(p);
    Observables1 o =
        scheme1_observables_core(m.alpha_in, p.detector.p_dark, p.effective_e_ali());
    o.alpha_b = m.alpha_b;
    return o;
}

/// One of the two random-phase integrals of the dark-count-assisted gain:
/// (p(1-p)/2pi) Int_0^2pi [1-(1-p)e^{-a|1+e^{it}|^2}] (1-p)e^{-a|1-e^{it}|^2} dt,
/// with the two exponents swapped when `mirrored`. Uniform trapezoid on the
/// period, doubling the resolution until the change is below 1e-14.
inline double v_integral_term(double alpha_in, double p_dark, bool mirrored) {
    const double q = 1.0 - p_dark;
    auto integrand = [&](double theta) {
        const double bright = alpha_in * (2.0 + 2.0 * std::cos(theta));
        const double dim = alpha_in * (2.0 - 2.0 * std::cos(theta));
        const double ea = std::exp(-(mirrored ? dim : bright));
        const double eb = std::exp(-(mirrored ? bright : dim));
        return (1.0 - q * ea) * (q * eb);
    };
    double prev = 0.0;
    for (int n = 64; n <= (1 << 20); n *= 2) {
        double sum = 0.0;
        const double h = 2.0 * M_PI / n;
        for (int k = 0; k < n; ++k) sum += integrand(k * h);
        const double cur = sum * h / (2.0 * M_PI);
        if (n > 64 && std::abs(cur - prev) < 1e-14) {
            prev = cur;
            break;
        }
        prev = cur;
    }
    return p_dark * q * prev;
}

/// Full dark-count-assisted gain V; its two theta integrals are equal under
/// theta -> theta + pi, so one is computed and doubled.
inline double v_integral(double alpha_in, double p_dark) {
    if (!(alpha_in >= 0.0)) throw std::invalid_argument("v_integral: alpha_in must be >= 0");
    return 2.0 * v_integral_term(alpha_in, p_dark, false);
}

/// Detection statistics of the converter scheme under normal operation.
struct Observables2 {
    double q11_x = 0.0;      ///< gain when both parties emit a single photon
    double delta11_x = 0.0;  ///< its bit error rate
    double q11_y = 0.0;      ///< equals q11_x
    double delta11_y = 0.0;  ///< equals delta11_x
    double q_x = 0.0;        ///< overall X-basis gain
    double delta_x = 0.0;    ///< overall X-basis error rate
    double w21 = 0.0;        ///< dark-count term, one of two photons arrives
    double w20 = 0.0;        ///< dark-count term, neither photon arrives
    double v = 0.0;          ///< random-phase dark-count gain
    /// single-photon arrival probability conditioned on both parties
    /// emitting one photon; the denominator of the worst-case flaw bound
    double conditional_arrival = 0.0;
    double alpha_in = 0.0;
    double alpha_b = 0.0;
};

/// Core of the converter scheme's statistics in terms of the per-party
/// transmissions and matched intensities (alpha_a*eta_a = alpha_b*eta_b).
inline Observables2 scheme2_observables_core(double alpha_a, double alpha_b, double eta_a,
                                             double eta_b, double p_dark, double e_ali) {
    const double pd = p_dark;
    const double q = 1.0 - pd;
    const double ea = eta_a, eb = eta_b;
    const double aa = alpha_a, ab = alpha_b;

    Observables2 o;
    o.alpha_in = aa * ea;
    o.alpha_b = ab;

    // probability that both parties emit exactly one photon
    const double mu = 4.0 * aa * ab * std::exp(-2.0 * (aa + ab));
    o.w21 = 2.0 * mu * (ea * (1.0 - eb) + (1.0 - ea) * eb) * pd * q * q;
    o.w20 = 4.0 * mu * (1.0 - ea) * (1.0 - eb) * pd * pd * q * q;
    o.q11_x = mu * ea * eb * 0.5 * q * q * (1.0 + pd) + o.w21 + o.w20;
    const double err11 = mu * ea * eb * 0.5 * pd * q * q +
                         e_ali * mu * ea * eb * 0.5 * q * q + 0.5 * (o.w21 + o.w20);
    o.delta11_x = o.q11_x > 0.0 ? err11 / o.q11_x : 0.0;
    o.q11_y = o.q11_x;
    o.delta11_y = o.delta11_x;

    o.v = v_integral(o.alpha_in, pd);
    const double optical = std::exp(-o.alpha_in);
    const double click = 1.0 - q * optical;
    o.q_x = 2.0 * click * click * q * q * optical * optical + o.v;
    const double err_x = o.v + e_ali * 2.0 * (1.0 - optical) * (1.0 - optical) * q * q *
                                   optical * optical;
    o.delta_x = o.q_x > 0.0 ? err_x / o.q_x : 0.0;

    o.conditional_arrival = ea * eb * 0.5 * q * q * (1.0 + pd) +
                            2.0 * (ea * (1.0 - eb) + (1.0 - ea) * eb) * pd * q * q +
                            4.0 * (1.0 - ea) * (1.0 - eb) * pd * pd * q * q;
    return o;
}

inline Observables2 scheme2_observables(const ScenarioParams& p) {
    p.validate();
    if (p.scheme != Scheme::II)
        throw std::invalid_argument("scheme2_observables: params are not scheme II");
    const IntensityMatch m = intensity_matching(p);
    return scheme2_observables_core(p.alpha_a, m.alpha_b, m.eta_a, m.eta_b,
                                    p.detector.p_dark, p.effective_e_ali());
}

}  // namespace mdiqkd
