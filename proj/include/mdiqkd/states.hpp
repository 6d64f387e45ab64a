#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdiqkd {

/// Coherent-state field amplitude beta; |beta|^2 is the mean photon number.
using CoherentAmplitude = std::complex<double>;

inline bool is_finite(CoherentAmplitude b) {
    return std::isfinite(b.real()) && std::isfinite(b.imag());
}

inline double mean_photon_number(CoherentAmplitude b) { return std::norm(b); }

/// Overlap of two coherent states,
/// <b1|b2> = exp(-(|b1|^2 + |b2|^2)/2 + conj(b1)*b2).
/// |result| = exp(-|b1-b2|^2/2) <= 1, with equality iff b1 == b2.
inline std::complex<double> coherent_overlap(CoherentAmplitude b1, CoherentAmplitude b2) {
    return std::exp(-0.5 * (std::norm(b1) + std::norm(b2)) + std::conj(b1) * b2);
}

/// Imperfect phase modulator. The phase applied for a target modulation
/// theta is theta*(1 + delta/pi), so the worst-case error at theta = pi is
/// delta. The wrong-port power ratio of an interferometer driven by such a
/// modulator is eta_ex = tan^2(delta/2).
struct ModulatorModel {
    double eta_ex = 0.0;  ///< extinction ratio, dimensionless, >= 0
    double delta = 0.0;   ///< phase modulation error, radians, >= 0

    /// delta as the principal solution of tan^2(delta/2) = eta_ex, in [0, pi).
    static ModulatorModel from_extinction_ratio(double eta_ex) {
        if (!(eta_ex >= 0.0) || !std::isfinite(eta_ex))
            throw std::invalid_argument("ModulatorModel: eta_ex must be finite and >= 0");
        return {eta_ex, 2.0 * std::atan(std::sqrt(eta_ex))};
    }

    /// The sign of the error never enters any fidelity; |delta| is used.
    static ModulatorModel from_phase_error(double delta) {
        if (!std::isfinite(delta))
            throw std::invalid_argument("ModulatorModel: delta must be finite");
        delta = std::abs(delta);
        const double t = std::tan(0.5 * delta);
        return {t * t, delta};
    }

    static ModulatorModel ideal() { return {}; }
};

enum class Basis { X, Y };

/// Density operator over a span of coherent states: sum_i w_i |b_i><b_i|.
struct GramMixture {
    std::vector<CoherentAmplitude> amplitudes;
    std::vector<double> weights;

    void validate() const {
        std::string err;
        if (amplitudes.empty()) err += "amplitude list is empty; ";
        if (amplitudes.size() != weights.size()) err += "weights/amplitudes length mismatch; ";
        for (const auto& b : amplitudes)
            if (!is_finite(b)) { err += "non-finite amplitude; "; break; }
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) { err += "negative weight; "; break; }
            sum += w;
        }
        if (!weights.empty() && std::abs(sum - 1.0) > 1e-12) err += "weights do not sum to 1; ";
        if (!err.empty()) throw std::invalid_argument("GramMixture: " + err);
    }

    static GramMixture equal_pair(CoherentAmplitude b0, CoherentAmplitude b1) {
        return {{b0, b1}, {0.5, 0.5}};
    }
};

/// States actually emitted by an imperfect source of intensity alpha:
///   X: equal mixture of sqrt(a) and -e^{i d} sqrt(a)
///   Y: equal mixture of i e^{i d/2} sqrt(a) and -i e^{-i d/2} sqrt(a)
inline GramMixture actual_state_family(double alpha, const ModulatorModel& m, Basis basis) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("actual_state_family: alpha must be finite and >= 0");
    const double r = std::sqrt(alpha);
    const std::complex<double> i(0.0, 1.0);
    if (basis == Basis::X)
        return GramMixture::equal_pair(r, -std::exp(i * m.delta) * r);
    return GramMixture::equal_pair(i * std::exp(i * (0.5 * m.delta)) * r,
                                   -i * std::exp(-i * (0.5 * m.delta)) * r);
}

struct LosslessJointProbs {
    double p_psi;  ///< P(type-0 success and shared Psi+)
    double p_phi;  ///< P(type-0 success and shared Phi+), the phase-error branch
};

/// Joint success/state probabilities of the lossless interference model,
/// alpha_prime being the (equal) arriving intensity per party:
///   p_psi = (1 - e^{-4a})/4,  p_phi = (1 - e^{-2a})^2 / 4.
inline LosslessJointProbs lossless_joint_probs(double alpha_prime) {
    if (!std::isfinite(alpha_prime) || alpha_prime < 0.0)
        throw std::invalid_argument("lossless_joint_probs: alpha_prime must be finite and >= 0");
    const double one_m_e2 = -std::expm1(-2.0 * alpha_prime);
    const double one_m_e4 = -std::expm1(-4.0 * alpha_prime);
    return {0.25 * one_m_e4, 0.25 * one_m_e2 * one_m_e2};
}

}  // namespace mdiqkd
