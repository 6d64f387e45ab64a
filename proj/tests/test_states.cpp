#include "mdiqkd/states.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fock_oracle.hpp"

using namespace mdiqkd;

TEST(CoherentOverlap, IdenticalVacuumIsOne) {
    const auto o = coherent_overlap({0.0, 0.0}, {0.0, 0.0});
    EXPECT_DOUBLE_EQ(o.real(), 1.0);
    EXPECT_DOUBLE_EQ(o.imag(), 0.0);
}

TEST(CoherentOverlap, OppositeAmplitudes) {
    // <sqrt(.5)|-sqrt(.5)> = exp(-2*0.5) = 1/e
    const double r = std::sqrt(0.5);
    const auto o = coherent_overlap({r, 0.0}, {-r, 0.0});
    EXPECT_NEAR(o.real(), 0.36787944117144233, 1e-15);
    EXPECT_NEAR(o.imag(), 0.0, 1e-15);
}

TEST(CoherentOverlap, MatchesFockTruncation) {
    const CoherentAmplitude b1(0.0, 0.1);  // i*sqrt(0.01)
    const CoherentAmplitude b2(0.1, 0.0);
    const auto o = coherent_overlap(b1, b2);
    EXPECT_NEAR(std::abs(o), std::exp(-0.01), 1e-15);
    const auto oracle = fock::overlap(b1, b2);
    EXPECT_NEAR(o.real(), oracle.real(), 1e-9);
    EXPECT_NEAR(o.imag(), oracle.imag(), 1e-9);
}

TEST(CoherentOverlap, ModulusBoundedByOne) {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 500; ++i) {
        const CoherentAmplitude b1(u(rng), u(rng));
        const CoherentAmplitude b2(u(rng), u(rng));
        const double mag = std::abs(coherent_overlap(b1, b2));
        EXPECT_LE(mag, 1.0 + 1e-15);
        if (b1 != b2) {
            EXPECT_LT(mag, 1.0);
        }
        EXPECT_NEAR(std::abs(coherent_overlap(b1, b1)), 1.0, 1e-15);
    }
}

TEST(ModulatorModel, ExtinctionRatioRoundTrip) {
    const auto m = ModulatorModel::from_extinction_ratio(1e-3);
    const double t = std::tan(0.5 * m.delta);
    EXPECT_NEAR(t * t, 1e-3, 1e-10);
    EXPECT_NEAR(m.delta, 2.0 * std::atan(std::sqrt(1e-3)), 1e-15);
    // the typical extinction ratio gives the reference error ~0.0632 rad
    EXPECT_NEAR(m.delta, 0.063224483992382381, 1e-5);

    const auto back = ModulatorModel::from_phase_error(m.delta);
    EXPECT_NEAR(back.eta_ex, 1e-3, 1e-12);
}

TEST(ModulatorModel, SignOfPhaseErrorIsDropped) {
    EXPECT_DOUBLE_EQ(ModulatorModel::from_phase_error(-0.05).delta, 0.05);
    EXPECT_THROW(ModulatorModel::from_extinction_ratio(-1.0), std::invalid_argument);
}

TEST(GramMixture, Validation) {
    EXPECT_THROW(GramMixture{}.validate(), std::invalid_argument);
    GramMixture mismatched{{CoherentAmplitude{0.1, 0.0}}, {0.5, 0.5}};
    EXPECT_THROW(mismatched.validate(), std::invalid_argument);
    GramMixture bad_sum{{CoherentAmplitude{0.1, 0.0}, CoherentAmplitude{0.2, 0.0}},
                        {0.5, 0.6}};
    EXPECT_THROW(bad_sum.validate(), std::invalid_argument);
    GramMixture negative{{CoherentAmplitude{0.1, 0.0}, CoherentAmplitude{0.2, 0.0}},
                         {1.5, -0.5}};
    EXPECT_THROW(negative.validate(), std::invalid_argument);
    GramMixture non_finite{
        {CoherentAmplitude{std::nan(""), 0.0}, CoherentAmplitude{0.2, 0.0}}, {0.5, 0.5}};
    EXPECT_THROW(non_finite.validate(), std::invalid_argument);
    EXPECT_NO_THROW(GramMixture::equal_pair({0.1, 0.0}, {-0.1, 0.0}).validate());
}

TEST(ActualStateFamily, IdealModulationX) {
    const double alpha = 0.04;
    const auto fam = actual_state_family(alpha, ModulatorModel::ideal(), Basis::X);
    ASSERT_EQ(fam.amplitudes.size(), 2u);
    EXPECT_DOUBLE_EQ(fam.weights[0], 0.5);
    EXPECT_DOUBLE_EQ(fam.weights[1], 0.5);
    EXPECT_NEAR(std::abs(fam.amplitudes[0] - CoherentAmplitude(0.2, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(fam.amplitudes[1] - CoherentAmplitude(-0.2, 0.0)), 0.0, 1e-15);
}

TEST(ActualStateFamily, ImperfectModulationY) {
    const auto m = ModulatorModel::from_extinction_ratio(1e-3);
    const auto fam = actual_state_family(0.01, m, Basis::Y);
    const std::complex<double> i(0.0, 1.0);
    const CoherentAmplitude want0 = i * std::exp(i * (0.5 * m.delta)) * 0.1;
    const CoherentAmplitude want1 = -i * std::exp(-i * (0.5 * m.delta)) * 0.1;
    // agreement checked through the overlap: unit overlap iff same state
    EXPECT_NEAR(std::abs(coherent_overlap(fam.amplitudes[0], want0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(coherent_overlap(fam.amplitudes[1], want1)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(fam.amplitudes[0]), 0.1, 1e-15);
}

TEST(LosslessJointProbs, VacuumNeverClicks) {
    const auto p = lossless_joint_probs(0.0);
    EXPECT_DOUBLE_EQ(p.p_psi, 0.0);
    EXPECT_DOUBLE_EQ(p.p_phi, 0.0);
}

TEST(LosslessJointProbs, StrongPulseAsymptote) {
    const auto p = lossless_joint_probs(1e3);
    EXPECT_NEAR(p.p_psi, 0.25, 1e-15);
    EXPECT_NEAR(p.p_phi, 0.25, 1e-15);
}

TEST(LosslessJointProbs, DirectEvaluation) {
    const auto p = lossless_joint_probs(0.1);
    EXPECT_NEAR(p.p_psi, 0.082419988491090175, 1e-15);
    EXPECT_NEAR(p.p_phi, 0.0082146349699188959, 1e-15);
}

TEST(LosslessJointProbs, MatchesBeamsplitterBruteForce) {
    for (const double a : {0.01, 0.05, 0.1, 0.3, 0.5}) {
        const auto got = lossless_joint_probs(a);
        const auto oracle = fock::beamsplitter_joint_probs(a);
        EXPECT_NEAR(got.p_psi, oracle.p_psi, 1e-9) << "alpha'=" << a;
        EXPECT_NEAR(got.p_phi, oracle.p_phi, 1e-9) << "alpha'=" << a;
    }
}

TEST(LosslessJointProbs, OrderingAndNormalization) {
    for (double a = 1e-4; a < 20.0; a *= 1.7) {
        const auto p = lossless_joint_probs(a);
        EXPECT_GE(p.p_psi, p.p_phi) << "alpha'=" << a;
        EXPECT_LE(2.0 * (p.p_psi + p.p_phi), 1.0 + 1e-15) << "alpha'=" << a;
    }
}
