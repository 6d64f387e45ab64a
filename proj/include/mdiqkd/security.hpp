#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "mdiqkd/detail/golden.hpp"
#include "mdiqkd/fidelity.hpp"
#include "mdiqkd/states.hpp"

namespace mdiqkd {

/// Which flaw quantification the security pipeline uses.
enum class FlawVariant { Original, Erratum };

/// A basis-dependent flaw value tagged with the variant that produced it.
struct FlawModel {
    FlawVariant variant = FlawVariant::Original;
    double delta_ini = 0.0;

    void validate() const {
        if (!(delta_ini >= 0.0 && delta_ini <= 0.5))
            throw std::invalid_argument("FlawModel: delta_ini outside [0, 1/2]");
    }
};

/// h(x) = -x log2 x - (1-x) log2(1-x), with h(0) = h(1) = 0 by continuity.
inline double binary_entropy(double x) {
    if (!(x >= 0.0) || !(x <= 1.0))
        throw std::domain_error("binary_entropy: argument outside [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// Basis-flaw measure of the phase-locked scheme with ideal modulation:
/// [1 - e^{-(aA+aB)} (cos aA + sin aA)(cos aB + sin aB)] / 2.
inline double delta_ini_scheme1_original(double alpha_a, double alpha_b) {
    if (!(alpha_a >= 0.0) || !(alpha_b >= 0.0))
        throw std::invalid_argument("delta_ini_scheme1_original: intensities must be >= 0");
    // one purification-overlap factor per party keeps the swap symmetry exact
    auto factor = [](double a) { return std::exp(-a) * (std::cos(a) + std::sin(a)); };
    return std::clamp(0.5 * (1.0 - factor(alpha_a) * factor(alpha_b)), 0.0, 0.5);
}

/// Flaw measure from the two parties' X/Y basis fidelities: (1 - fa*fb)/2.
inline double delta_ini_actual_states(double fa, double fb) {
    if (!(fa >= 0.0) || !(fa <= 1.0) || !(fb >= 0.0) || !(fb <= 1.0))
        throw std::invalid_argument("delta_ini_actual_states: fidelities must be in [0,1]");
    return 0.5 * (1.0 - fa * fb);
}

struct SecurityInput {
    double delta_ini = 0.0;         ///< flaw before losses, in [0, 1/2]
    double success_fraction = 0.0;  ///< success probability Eve can post-select on
    double delta_y_observed = 0.0;  ///< observed Y-basis bit error probability

    void validate() const {
        if (!(delta_ini >= 0.0 && delta_ini <= 1.0))
            throw std::invalid_argument("SecurityInput: delta_ini outside [0,1]");
        if (!(delta_y_observed >= 0.0 && delta_y_observed <= 1.0))
            throw std::invalid_argument("SecurityInput: delta_y_observed outside [0,1]");
        if (!(success_fraction > 0.0))
            throw std::domain_error("SecurityInput: success fraction must be positive");
    }
};

/// Worst-case coin imbalance: min(delta_ini / success_fraction, 1/2).
/// Values above 1/2 carry no extra constraint, so the bound is capped there.
inline double worst_case_delta(const SecurityInput& s) {
    s.validate();
    return std::min(s.delta_ini / s.success_fraction, 0.5);
}

/// Largest delta_y' in [0,1] satisfying
///   1 - 2*delta_cap <= sqrt(dy dy') + sqrt((1-dy)(1-dy')).
/// Solved in closed form (quadratic in sqrt(dy')); bisection fallback when
/// the closed form is numerically marginal.
inline double invert_phase_error_bound(double delta_cap, double delta_y) {
    const double dy = std::clamp(delta_y, 0.0, 1.0);
    const double c = 1.0 - 2.0 * std::clamp(delta_cap, 0.0, 1.0);
    if (c <= 0.0) return 1.0;           // bound vacuous
    if (c * c <= dy) return 1.0;        // satisfied even at dy' = 1
    const double disc = dy * (1.0 - dy) * (1.0 - c * c);
    double x = dy * c * c + (1.0 - dy) * (1.0 - c * c) +
               2.0 * c * std::sqrt(std::max(disc, 0.0));
    x = std::clamp(x, dy, 1.0);

    auto lhs = [&](double t) {
        return std::sqrt(dy * t) + std::sqrt((1.0 - dy) * (1.0 - t));
    };
    if (std::abs(lhs(x) - c) > 1e-9) {
        double lo = dy, hi = 1.0;  // lhs decreases from 1 to sqrt(dy) on [dy, 1]
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            (lhs(mid) >= c ? lo : hi) = mid;
        }
        x = lo;
    }
    return x;
}

/// Key rate of the phase-locked scheme, X-basis:
///   G = gamma_suc_x * (1 - f_ec h(delta_x) - h(delta_y')), clamped at 0.
/// The privacy term is evaluated at min(delta_y', 1/2).
inline double key_rate_scheme1(double gamma_suc_x, double delta_x, double delta_y_prime,
                               double f_ec) {
    const double g = gamma_suc_x * (1.0 - f_ec * binary_entropy(delta_x) -
                                    binary_entropy(std::min(delta_y_prime, 0.5)));
    return std::max(g, 0.0);
}

/// Key rate of the converter scheme, X-basis:
///   G = Q11_x (1 - h(delta_y11')) - f_ec Q_x h(delta_x), clamped at 0.
inline double key_rate_scheme2(double q11_x, double delta_y11_prime, double q_x,
                               double delta_x, double f_ec) {
    if (q11_x > q_x * (1.0 + 1e-9))
        throw std::invalid_argument(
            "key_rate_scheme2: single-photon gain exceeds overall gain");
    q11_x = std::min(q11_x, q_x);
    const double g = q11_x * (1.0 - binary_entropy(std::min(delta_y11_prime, 0.5))) -
                     f_ec * q_x * binary_entropy(delta_x);
    return std::max(g, 0.0);
}

/// A party's four prepared pure states (bit 0/1 in bases X/Y), expressed in
/// a common orthonormal basis.
struct PartySources {
    Eigen::VectorXcd x0, x1, y0, y1;

    /// Coherent source of intensity alpha with an imperfect modulator.
    static PartySources coherent(double alpha, const ModulatorModel& m) {
        const GramMixture fx = actual_state_family(alpha, m, Basis::X);
        const GramMixture fy = actual_state_family(alpha, m, Basis::Y);
        const CoherentAmplitude kets[4] = {fx.amplitudes[0], fx.amplitudes[1],
                                           fy.amplitudes[0], fy.amplitudes[1]};
        const SpanCoords span = orthonormal_span(kets);
        return {span.coords.col(0), span.coords.col(1), span.coords.col(2),
                span.coords.col(3)};
    }

    /// Single-photon source with an imperfect modulator.
    static PartySources single_photon(const ModulatorModel& m) {
        auto v = [&](Basis b, int bit) {
            return Eigen::VectorXcd(single_photon_state(m, b, bit));
        };
        return {v(Basis::X, 0), v(Basis::X, 1), v(Basis::Y, 0), v(Basis::Y, 1)};
    }
};

/// Fidelity F(rho_X, rho_Y) between the party's equal-mixture basis
/// densities.
inline double basis_fidelity(const PartySources& p) {
    const Eigen::MatrixXcd rho_x =
        0.5 * (p.x0 * p.x0.adjoint()) + 0.5 * (p.x1 * p.x1.adjoint());
    const Eigen::MatrixXcd rho_y =
        0.5 * (p.y0 * p.y0.adjoint()) + 0.5 * (p.y1 * p.y1.adjoint());
    return std::clamp(uhlmann_fidelity(rho_x, rho_y), 0.0, 1.0);
}

/// Maximum coin overlap of one party,
///   M = max_{theta, xi_X, xi_Y} Re( e^{i theta} <Psi_Y|Psi_X> ),
/// with |Psi_W> = (|0_W>|chi_0W> + e^{i xi_W} |1_W>|chi_1W>)/sqrt(2) and the
/// usual mutually unbiased qubit bases. The two xi phases reduce the search
/// to the support functions of two origin-centred ellipses; the remaining
/// one-dimensional angle is maximized numerically to machine precision.
inline double coin_overlap_max(const PartySources& p) {
    const std::complex<double> q_diag(0.0, -1.0 / std::sqrt(2.0));  // <0y|0x> = <1y|1x>
    const std::complex<double> q_cross(1.0 / std::sqrt(2.0), 0.0);  // <0y|1x> = <1y|0x>
    const std::complex<double> z00 = q_diag * p.y0.dot(p.x0);
    const std::complex<double> z01 = q_cross * p.y0.dot(p.x1);
    const std::complex<double> z10 = q_cross * p.y1.dot(p.x0);
    const std::complex<double> z11 = q_diag * p.y1.dot(p.x1);

    // z_a e^{-iu} + z_b e^{+iu} traces an origin-centred ellipse with
    // semi-axes |z_a|+|z_b| and ||z_a|-|z_b||, major axis at the mean arg.
    struct Ellipse {
        double major, minor, angle;
    };
    auto ellipse = [](std::complex<double> za, std::complex<double> zb) {
        return Ellipse{std::abs(za) + std::abs(zb), std::abs(std::abs(za) - std::abs(zb)),
                       0.5 * (std::arg(za) + std::arg(zb))};
    };
    const Ellipse e1 = ellipse(z00, z11);
    const Ellipse e2 = ellipse(z01, z10);
    auto support = [](const Ellipse& e, double phi) {
        return std::hypot(e.major * std::cos(phi - e.angle),
                          e.minor * std::sin(phi - e.angle));
    };
    auto objective = [&](double phi) { return support(e1, phi) + support(e2, phi); };

    // pi-periodic and smooth; dense scan plus golden refinement
    constexpr int n = 720;
    const double step = M_PI / n;
    double best_phi = 0.0, best = objective(0.0);
    for (int k = 1; k < n; ++k) {
        const double v = objective(k * step);
        if (v > best) {
            best = v;
            best_phi = k * step;
        }
    }
    auto [phi, val] =
        detail::golden_max(objective, best_phi - step, best_phi + step, 0.0, 1e-13);
    (void)phi;
    return std::clamp(0.5 * std::max(val, best), 0.0, 1.0);
}

/// Corrected flaw measure: Min over parties of
///   [1 - M_party * F(other party's basis densities)] / 2.
inline double delta_ini_erratum(const PartySources& a, const PartySources& b) {
    const double da = 0.5 * (1.0 - coin_overlap_max(a) * basis_fidelity(b));
    const double db = 0.5 * (1.0 - coin_overlap_max(b) * basis_fidelity(a));
    return std::clamp(std::min(da, db), 0.0, 0.5);
}

}  // namespace mdiqkd
