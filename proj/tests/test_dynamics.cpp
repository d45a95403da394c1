#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "orient/canonical.hpp"
#include "orient/classical.hpp"
#include "orient/dynamics.hpp"
#include "orient/error.hpp"
#include "orient/phase_space.hpp"

using namespace orient;

namespace {

using Real50 = boost::multiprecision::cpp_bin_float_50;

const JKMBasisSpec kBlock33(40, std::pair{3, 3});

RotorState ket333(int j_max = 40) {
    const JKMBasisSpec b(j_max, std::pair{3, 3});
    return RotorState::pure(b, CVector::Unit(static_cast<Eigen::Index>(b.dimension()), 0));
}

PulseConfig fig3_pulse() {
    PulseConfig p;
    p.duration = 1e-3;
    p.strength = 1.0;
    p.strength = -10.0 / p.area();
    return p;
}

// Wigner small-d for m = m' from the explicit factorial sum, in 50-digit arithmetic.
Real50 small_d_diagonal(int j, int m, const Real50& x) {
    using boost::math::factorial;
    const Real50 c = sqrt((1 + x) / 2);
    const Real50 s = sqrt((1 - x) / 2);
    Real50 sum = 0;
    for (int k = std::max(0, 0); k <= j - m; ++k) {
        if (j + m - k < 0) continue;
        const Real50 term = factorial<Real50>(j + m) * factorial<Real50>(j - m) /
                            (factorial<Real50>(j + m - k) * factorial<Real50>(k) * factorial<Real50>(j - k - m) *
                             factorial<Real50>(k));
        sum += ((k % 2) ? -1 : 1) * term * pow(c, 2 * j - 2 * k) * pow(s, 2 * k);
    }
    return sum;
}

Real50 cos2_oracle(int Jp, int J, int m) {
    auto f = [&](const Real50& x) { return small_d_diagonal(Jp, m, x) * x * x * small_d_diagonal(J, m, x); };
    const Real50 integral = boost::math::quadrature::gauss<Real50, 30>::integrate(f, Real50(-1), Real50(1));
    return sqrt(Real50((2 * J + 1) * (2 * Jp + 1))) / 2 * integral;
}

}  // namespace

TEST(FreeEnergies, SubstitutionAndCommensurability) {
    TopConstants k;
    k.C = 0.8;
    const JKMBasisSpec b(5, std::pair{3, 3});
    const auto e = free_energies(b, k);
    EXPECT_NEAR(e[0], 6 + 9 * (k.C - 0.5), 1e-14);
    EXPECT_EQ(free_energies(JKMBasisSpec(0, std::pair{0, 0}), k)[0], 0.0);

    TopConstants half;
    const auto levels = free_energies(JKMBasisSpec(40, std::pair{0, 0}), half);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double gap = levels[i] - levels[j];
            EXPECT_EQ(gap, std::round(gap)) << "J = " << i << ", " << j;
        }
    }
}

TEST(Cos2Matrix, AnalyticEntries) {
    const OperatorMatrix m0 = cos2beta_matrix(JKMBasisSpec(4, std::pair{0, 0}));
    EXPECT_NEAR(m0.matrix()(0, 0).real(), 1.0 / 3.0, 1e-15);
    const OperatorMatrix m = cos2beta_matrix(JKMBasisSpec(9, std::pair{3, 3}));
    EXPECT_EQ(m.matrix()(4, 0), cplx(0.0));
    EXPECT_EQ(cos2beta_element(7, 3, 3, 3), 0.0);
    EXPECT_LT((m.matrix() - m.matrix().adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Cos2Matrix, QuadratureMatchesClebschGordan) {
    for (auto [K, M] : {std::pair{3, 3}, std::pair{0, 2}, std::pair{-2, 1}}) {
        const JKMBasisSpec b(12, std::pair{K, M});
        const OperatorMatrix m = cos2beta_matrix(b);
        const int j0 = std::max(std::abs(K), std::abs(M));
        for (int r = 0; r < static_cast<int>(b.dimension()); ++r) {
            for (int c = 0; c < static_cast<int>(b.dimension()); ++c) {
                EXPECT_NEAR(m.matrix()(r, c).real(), cos2beta_element(j0 + r, j0 + c, K, M), 1e-12);
            }
        }
    }
}

TEST(Cos2Matrix, ExtendedPrecisionOracle) {
    const double oracle = static_cast<double>(cos2_oracle(5, 3, 3));
    EXPECT_NEAR(cos2beta_element(5, 3, 3, 3), oracle, 1e-12);
    EXPECT_NEAR(cos2beta_matrix(JKMBasisSpec(6, std::pair{3, 3})).matrix()(2, 0).real(), oracle, 1e-12);
    EXPECT_NEAR(cos2beta_element(4, 4, 3, 3), static_cast<double>(cos2_oracle(4, 4, 3)), 1e-12);
    EXPECT_NEAR(clebsch_gordan(1, 0, 1, 0, 2, 0), std::sqrt(2.0 / 3.0), 1e-15);
}

TEST(FreePropagate, IdentityAndRecurrence) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    CVector c(38);
    for (auto& x : c) x = cplx(n(rng), n(rng));
    const RotorState s = RotorState::normalized(kBlock33, c);
    TopConstants k;
    k.C = 0.37;
    EXPECT_LT((free_propagate(s, 0.0, k).coefficients() - s.coefficients()).norm(), 1e-15);
    EXPECT_NEAR(fidelity(free_propagate(s, 2 * kPi, k), s), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(free_propagate(ket333(), 1.234, k), ket333()), 1.0, 1e-14);
}

TEST(Kick, ZeroStrengthIsFreeEvolution) {
    PulseConfig p;
    p.strength = 0.0;
    p.duration = 1e-2;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n;
    CVector c(10);
    for (auto& x : c) x = cplx(n(rng), n(rng));
    const RotorState s = RotorState::normalized(JKMBasisSpec(12, std::pair{3, 3}), c);
    TopConstants k;
    const RotorState kicked = propagate_kick(s, p, k);
    EXPECT_GT(fidelity(kicked, free_propagate(s, p.end() - p.start(), k)), 1 - 1e-10);
}

TEST(Kick, MatchesSuddenApproximation) {
    const PulseConfig p = fig3_pulse();
    TopConstants k;
    const RotorState s = ket333();
    KickReport report;
    const RotorState kicked = propagate_kick(s, p, k, 1e-10, &report);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cos2beta_matrix(kBlock33).matrix().real());
    const CVector phase = (eig.eigenvalues().cast<cplx>() * cplx(0, -p.area())).array().exp().matrix();
    const CMatrix V = eig.eigenvectors().cast<cplx>();
    const RotorState half = free_propagate(s, p.center_time - p.start(), k);
    const RotorState sudden = free_propagate(
        RotorState::normalized(kBlock33, V * phase.asDiagonal() * V.adjoint() * half.coefficients()),
        p.end() - p.center_time, k);
    EXPECT_GT(fidelity(kicked, sudden), 1 - 1e-4);
    EXPECT_LT(report.top_shell_population, 1e-6);
}

TEST(Kick, NormDriftStaysWithinTolerance) {
    for (double tol : {1e-8, 1e-10}) {
        KickReport report;
        propagate_kick(ket333(), fig3_pulse(), TopConstants{}, tol, &report);
        EXPECT_LT(report.norm_drift, 100 * tol) << "tol = " << tol;
        EXPECT_EQ(report.renormalized, report.norm_drift > 1e-12);
        EXPECT_GT(report.steps, 0);
    }
}

TEST(Kick, ConservesKAndMBlock) {
    const RotorState kicked = propagate_kick(ket333(), fig3_pulse(), TopConstants{});
    const JKMBasisSpec& b = kicked.jkm_basis();
    for (std::size_t i = 0; i < b.dimension(); ++i) {
        EXPECT_EQ(b.entry(i).K, 3);
        EXPECT_EQ(b.entry(i).M, 3);
    }
    EXPECT_NEAR(kicked.coefficients().norm(), 1.0, 1e-9);
}

TEST(Alignment, PostKickRecurrenceAndRevival) {
    AlignmentConfig cfg;
    cfg.pulse = fig3_pulse();
    // Samples start after the pulse window closes.
    for (int i = 1; i <= 20; ++i) cfg.times.push_back(0.01 * i);
    for (int i = 1; i <= 20; ++i) cfg.times.push_back(2 * kPi + 0.01 * i);
    const AlignmentResult r = run_alignment(cfg);
    EXPECT_GT(r.post_kick_signal, r.pre_kick_signal);
    ASSERT_TRUE(r.post_kick.has_value());
    for (int i = 0; i < 20; ++i) EXPECT_NEAR(r.signal[i + 20], r.signal[i], 1e-10);
    const RotorState later = free_propagate(*r.post_kick, 0.3, cfg.constants);
    EXPECT_NEAR(fidelity(free_propagate(later, 2 * kPi, cfg.constants), later), 1.0, 1e-10);
}

TEST(Alignment, IsotropicGroundStateIsConstant) {
    AlignmentConfig cfg;
    cfg.initial = {0, 0, 0};
    cfg.j_max = 6;
    cfg.times = {-1.0, 0.0, 0.5, 2.0, 10.0};
    for (const auto& [t, s] : alignment_signal(cfg)) EXPECT_NEAR(s, 1.0 / 3.0, 1e-12) << "t = " << t;
}

TEST(Alignment, RejectsUnsortedTimesAndBadConfig) {
    AlignmentConfig cfg;
    cfg.times = {0.5, 0.1};
    EXPECT_THROW(run_alignment(cfg), DomainError);
    cfg.times = {0.1};
    cfg.j_max = 2;
    EXPECT_THROW(run_alignment(cfg), DomainError);
    PulseConfig p;
    p.duration = 0;
    EXPECT_THROW(p.check(), DomainError);
    TopConstants k;
    k.A = -1;
    EXPECT_THROW(k.check(), DomainError);
}

TEST(Alignment, SnapshotAngleMarginalMatchesDensity) {
    AlignmentConfig cfg;
    cfg.pulse = fig3_pulse();
    cfg.pulse.strength /= 5;
    cfg.j_max = 14;
    cfg.times = {0.05};
    const AlignmentResult r = run_alignment(cfg);
    ASSERT_LT(r.kick.top_shell_population, 1e-8);
    const RotorState& s = r.snapshots.at(0);
    MomentumWindow w;
    w.lo = {3, -400, 3};
    w.hi = {3, 400, 3};
    const PhaseSpaceGrid W = wigner_from_angle_basis(s, {{1, 6, 1}, w});
    const Marginals m = marginals(W);
    for (std::size_t a = 1; a < W.n_angles(); ++a) {
        EXPECT_NEAR(m.angle[a], angle_density(s, W.spec().angles.at(a)), 1e-6) << "point " << a;
    }
}

TEST(Classical, VectorFieldSpecialCases) {
    TopConstants k;
    k.C = 0.8;
    ClassicalState s;
    s.beta = 1.1;
    s.p_beta = 0.7;
    ClassicalDerivative d = classical_vector_field(s, k);
    EXPECT_EQ(d.p_beta, 0.0);
    EXPECT_EQ(d.alpha, 0.0);
    EXPECT_NEAR(d.beta, 0.7 / k.I1(), 1e-15);

    s.beta = kPi / 2;
    s.p_alpha = s.p_gamma = 1.3;
    d = classical_vector_field(s, k);
    EXPECT_NEAR(d.p_beta, -1.3 * 1.3 / k.I1(), 1e-12);
    EXPECT_EQ(d.p_alpha, 0.0);
    EXPECT_EQ(d.p_gamma, 0.0);

    s.beta = 1e-9;
    EXPECT_THROW(classical_vector_field(s, k), SingularityError);
}

TEST(Classical, VectorFieldIsHamiltonGradient) {
    TopConstants k;
    k.A = 0.5;
    k.C = 0.8;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(0.3, kPi - 0.3), mom(-3, 3);
    const double h = 2e-4;
    auto fd = [&](ClassicalState s, double ClassicalState::*field) {
        const double x = s.*field;
        double acc = 0;
        const double w[4] = {1, -8, 8, -1};
        const double off[4] = {-2, -1, 1, 2};
        for (int i = 0; i < 4; ++i) {
            s.*field = x + off[i] * h;
            acc += w[i] * classical_hamiltonian(s, k);
        }
        return acc / (12 * h);
    };
    for (int i = 0; i < 100; ++i) {
        ClassicalState s{angle(rng), angle(rng), angle(rng), mom(rng), mom(rng), mom(rng)};
        const ClassicalDerivative d = classical_vector_field(s, k);
        EXPECT_NEAR(d.alpha, fd(s, &ClassicalState::p_alpha), 1e-9);
        EXPECT_NEAR(d.beta, fd(s, &ClassicalState::p_beta), 1e-9);
        EXPECT_NEAR(d.gamma, fd(s, &ClassicalState::p_gamma), 1e-9);
        EXPECT_NEAR(d.p_beta, -fd(s, &ClassicalState::beta), 1e-9);
        EXPECT_NEAR(d.p_alpha, -fd(s, &ClassicalState::alpha), 1e-9);
        EXPECT_NEAR(d.p_gamma, -fd(s, &ClassicalState::gamma), 1e-9);
    }
}

TEST(Classical, TrajectoryConservesEnergyAndCyclicMomenta) {
    TopConstants k;
    k.C = 0.8;
    for (const ClassicalState& s0 : {ClassicalState{0.1, 1.0, 0.2, 2.0, 0.0, 1.0},
                                     ClassicalState{2.0, 0.6, 1.0, -1.5, 0.8, 0.5},
                                     ClassicalState{0.0, 2.4, 3.0, 0.3, -1.2, -2.0}}) {
        const ClassicalPath path = classical_trajectory(s0, 10.0, k);
        EXPECT_FALSE(path.truncated);
        EXPECT_NEAR(path.t.back(), 10.0, 1e-12);
        const double e0 = classical_hamiltonian(s0, k);
        for (const ClassicalState& s : path.states) {
            EXPECT_LT(std::abs(classical_hamiltonian(s, k) - e0), 1e-9 * std::abs(e0));
            EXPECT_EQ(s.p_alpha, s0.p_alpha);
            EXPECT_EQ(s.p_gamma, s0.p_gamma);
        }
        EXPECT_LT(path.max_energy_drift, 1e-9);
    }
}

TEST(Classical, PoleTrajectoryIsTruncated) {
    const ClassicalState s{0.0, 0.5, 0.0, 0.0, -1.0, 0.0};
    const ClassicalPath path = classical_trajectory(s, 10.0, TopConstants{});
    EXPECT_TRUE(path.truncated);
    EXPECT_LT(path.t.back(), 10.0);
    ClassicalState bad = s;
    bad.beta = 0.0;
    EXPECT_THROW(classical_trajectory(bad, 1.0, TopConstants{}), SingularityError);
}

TEST(Canonical, DiscrepancyShrinksWithWindow) {
    const TopConstants k;
    const CanonicalReport r8 = canonical_hamiltonian_check(8, k);
    const CanonicalReport r12 = canonical_hamiltonian_check(12, k);
    EXPECT_EQ(r8.computed.size(), 5u);
    EXPECT_LT(r12.discrepancy, r8.discrepancy);
    EXPECT_GE(r8.discrepancy / r12.discrepancy, 2.0);
}

TEST(Canonical, QuantumPotentialAblationShowsOffset) {
    const TopConstants k;
    const CanonicalReport r = canonical_hamiltonian_check(12, k);
    EXPECT_GT(r.discrepancy_without_potential, 10 * r.discrepancy);
    EXPECT_GT(std::abs(r.potential_offset), 0.1 / (8 * k.I1()));
}

TEST(Canonical, SphericalTopDegeneracy) {
    const CanonicalReport r = canonical_hamiltonian_check(10, TopConstants{}, 10);
    // With A = C every block (m_alpha, m_gamma) carries A J(J+1) for J >= max(|m_alpha|, |m_gamma|).
    int j1 = 0;
    for (const CanonicalBlock& b : r.blocks) {
        if (b.m_alpha != 0) continue;
        for (double e : b.exact) j1 += std::abs(e - 1.0) < 1e-12;
    }
    EXPECT_EQ(j1, 3);
    EXPECT_NEAR(r.exact[0], 0.0, 1e-15);
    for (int i = 1; i < 10; ++i) EXPECT_NEAR(r.exact[i], 1.0, 1e-12);
    for (int i = 1; i < 10; ++i) EXPECT_NEAR(r.computed[i], 1.0, 10 * r.discrepancy + 1e-12);
}
