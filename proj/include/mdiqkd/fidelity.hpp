#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "mdiqkd/states.hpp"

namespace mdiqkd {

/// Coordinates of a set of coherent-state kets in an orthonormal basis of
/// their span. Column k of `coords` holds the coordinates of ket k.
/// Built by eigendecomposing the Gram matrix G_kl = <b_k|b_l>; directions
/// with eigenvalue below rel_tol * (largest eigenvalue) are dropped, which
/// absorbs numerically coincident amplitudes.
struct SpanCoords {
    Eigen::MatrixXcd coords;  // rank x n
    int rank = 0;
};

inline SpanCoords orthonormal_span(std::span<const CoherentAmplitude> kets,
                                   double rel_tol = 1e-12) {
    const int n = static_cast<int>(kets.size());
    if (n == 0) throw std::invalid_argument("orthonormal_span: empty ket list");
    Eigen::MatrixXcd gram(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) gram(k, l) = coherent_overlap(kets[k], kets[l]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("orthonormal_span: Gram eigendecomposition failed");
    const auto& vals = es.eigenvalues();
    const double cut = rel_tol * vals(n - 1);
    if (!(vals(n - 1) > 0.0))
        throw std::domain_error("orthonormal_span: Gram matrix has no positive direction");

    int rank = 0;
    for (int k = 0; k < n; ++k)
        if (vals(k) > cut) ++rank;
    if (rank == 0) throw std::domain_error("orthonormal_span: degenerate amplitude set");

    // T = V_r S_r^{-1/2}; coordinates of ket k are column k of T^dagger G.
    Eigen::MatrixXcd t(n, rank);
    int j = 0;
    for (int k = 0; k < n; ++k) {
        if (vals(k) <= cut) continue;
        t.col(j++) = es.eigenvectors().col(k) / std::sqrt(vals(k));
    }
    return {t.adjoint() * gram, rank};
}

/// Square root of a Hermitian PSD matrix, rank truncated: eigenvalues below
/// rel_tol * (largest) are treated as exact zeros. Without the truncation,
/// eigenvalue noise of order eps turns into sqrt(eps)-sized artifacts.
inline Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& a, double rel_tol = 1e-12) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    const double cut = rel_tol * std::max(es.eigenvalues().maxCoeff(), 0.0);
    Eigen::VectorXd root = es.eigenvalues();
    for (int k = 0; k < root.size(); ++k) root(k) = root(k) > cut ? std::sqrt(root(k)) : 0.0;
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

/// Uhlmann fidelity F = Tr|sqrt(a) sqrt(b)| of two Hermitian PSD matrices
/// given in a common orthonormal basis, as the nuclear norm of the root
/// product. Singular values enter linearly, so spectral noise stays at
/// machine-epsilon level.
inline double uhlmann_fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(psd_sqrt(a) * psd_sqrt(b));
    return svd.singularValues().sum();
}

namespace detail {

// Density matrix of mixture columns [first, first+count) of a span.
inline Eigen::MatrixXcd mixture_density(const SpanCoords& span, const GramMixture& mix,
                                        int first) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(span.rank, span.rank);
    for (size_t i = 0; i < mix.amplitudes.size(); ++i) {
        const auto c = span.coords.col(first + static_cast<int>(i));
        rho += mix.weights[i] * (c * c.adjoint());
    }
    return rho;
}

}  // namespace detail

/// Fidelity F(rho1, rho2) = Tr|sqrt(rho1) sqrt(rho2)| between two density
/// operators over coherent-state spans, computed exactly in an orthonormal
/// basis of the joint amplitude span. Throws std::domain_error when rank
/// truncation loses state weight (degenerate amplitude set).
inline double fidelity_gram(const GramMixture& r1, const GramMixture& r2) {
    r1.validate();
    r2.validate();
    // pure-vs-pure reduces to the overlap modulus, exact to machine precision
    if (r1.amplitudes.size() == 1 && r2.amplitudes.size() == 1)
        return std::abs(coherent_overlap(r1.amplitudes[0], r2.amplitudes[0]));
    std::vector<CoherentAmplitude> all(r1.amplitudes);
    all.insert(all.end(), r2.amplitudes.begin(), r2.amplitudes.end());
    const SpanCoords span = orthonormal_span(all);

    const Eigen::MatrixXcd rho1 = detail::mixture_density(span, r1, 0);
    const Eigen::MatrixXcd rho2 =
        detail::mixture_density(span, r2, static_cast<int>(r1.amplitudes.size()));
    if (std::abs(rho1.trace().real() - 1.0) > 1e-8 ||
        std::abs(rho2.trace().real() - 1.0) > 1e-8)
        throw std::domain_error("fidelity_gram: span truncation lost state weight");

    return std::clamp(uhlmann_fidelity(rho1, rho2), 0.0, 1.0);
}

/// 2x2 Hermitian unit-trace density matrix of a single-photon qubit.
struct QubitDensity {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();

    void validate(double tol = 1e-12) const {
        if ((m - m.adjoint()).norm() > tol)
            throw std::invalid_argument("QubitDensity: not Hermitian");
        if (std::abs(m.trace().real() - 1.0) > tol)
            throw std::invalid_argument("QubitDensity: trace != 1");
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
        if (es.eigenvalues()(0) < -tol)
            throw std::invalid_argument("QubitDensity: negative eigenvalue");
    }

    static QubitDensity equal_pure_pair(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
        QubitDensity q;
        q.m = 0.5 * (a * a.adjoint()) + 0.5 * (b * b.adjoint());
        return q;
    }
};

/// Exact qubit fidelity, F^2 = Tr(rho sigma) + 2 sqrt(det rho det sigma).
inline double qubit_fidelity(const QubitDensity& r, const QubitDensity& s) {
    const double tr = (r.m * s.m).trace().real();
    const double dd = std::max(r.m.determinant().real(), 0.0) *
                      std::max(s.m.determinant().real(), 0.0);
    const double f2 = tr + 2.0 * std::sqrt(dd);
    return std::sqrt(std::clamp(f2, 0.0, 1.0));
}

/// Single-photon basis state for bit `bit` in basis `basis` under an
/// imperfect modulator: (|0> + e^{i phase} |1>)/sqrt(2) with
/// phase = 0, pi + d, pi/2 + d/2, -(pi/2 + d/2).
inline Eigen::Vector2cd single_photon_state(const ModulatorModel& m, Basis basis, int bit) {
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> phase;
    if (basis == Basis::X)
        phase = (bit == 0) ? std::complex<double>(1.0, 0.0) : -std::exp(i * m.delta);
    else
        phase = (bit == 0) ? i * std::exp(i * (0.5 * m.delta))
                           : -i * std::exp(-i * (0.5 * m.delta));
    Eigen::Vector2cd v;
    v << 1.0 / std::sqrt(2.0), phase / std::sqrt(2.0);
    return v;
}

/// Single-photon density matrix emitted in `basis` by an imperfect source.
inline QubitDensity scheme2_basis_density(const ModulatorModel& m, Basis basis) {
    return QubitDensity::equal_pure_pair(single_photon_state(m, basis, 0),
                                         single_photon_state(m, basis, 1));
}

/// F^(1): fidelity between the single-photon density matrices of the two
/// bases. Equals 1 for an ideal modulator.
inline double qubit_fidelity_scheme2(const ModulatorModel& m) {
    return qubit_fidelity(scheme2_basis_density(m, Basis::X),
                          scheme2_basis_density(m, Basis::Y));
}

}  // namespace mdiqkd
