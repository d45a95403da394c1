#include <gtest/gtest.h>

#include <cmath>

#include "orient/error.hpp"
#include "orient/states.hpp"

using namespace orient;

namespace {

CoherentSpec at(double angle, int m, double sigma = 1.0) {
    CoherentSpec c;
    c.sigma = sigma;
    c.center_angle = angle;
    c.center_m = m;
    return c;
}

RotorState cat_state(int k, const MBasisSpec& b) {
    return superpose({coherent_state(at(kPi, k), b), coherent_state(at(kPi, -k), b)}, {1.0, 1.0});
}

PhaseSpaceGrid alpha_slice(const RotorState& s, int n = 256, int window = 0) {
    return wigner_from_m_basis(s, {{n, 1, 1}, MomentumWindow::symmetric(window, 0, 0)});
}

}  // namespace

TEST(Theta3, MatchesMillionTermSum) {
    const double q = std::exp(-1.0 / 49.0);
    double direct = 1.0;
    for (long n = 1; n <= 1'000'000; ++n) direct += 2.0 * std::pow(q, static_cast<double>(n) * static_cast<double>(n));
    EXPECT_NEAR(theta3(q), direct, 1e-13);
    EXPECT_DOUBLE_EQ(theta3(0.0), 1.0);
}

TEST(CoherentState, NormalizedForSeveralWidths) {
    for (double sigma : {0.5, 1.0, 7.0}) {
        const CoherentSpec c = at(1.0, 2, sigma);
        const RotorState s = coherent_state(c, MBasisSpec(required_window(c), 1, 0));
        EXPECT_NEAR(s.coefficients().norm(), 1.0, 1e-12);
        // The literal Gaussian weights are normalized by theta3 at exp(-2/sigma^2).
        const auto i = static_cast<Eigen::Index>(s.m_basis().index({2, 0, 0}));
        EXPECT_NEAR(std::abs(s.coefficients()[i]), 1.0 / std::sqrt(theta3(std::exp(-2.0 / (sigma * sigma)))), 1e-12);
    }
}

TEST(CoherentState, NarrowWidthCollapsesToEigenstate) {
    const RotorState s = coherent_state(at(0.0, 0, 0.05), MBasisSpec(4, 0, 0));
    EXPECT_GT(std::norm(s.coefficients()[4]), 1 - 1e-9);
}

TEST(CoherentState, RejectsSmallWindowWithRequirement) {
    const CoherentSpec c = at(kPi, 10, 7.0);
    EXPECT_EQ(required_window(c), 52);
    try {
        coherent_state(c, MBasisSpec(40, 0, 0));
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("52"), std::string::npos);
    }
    CoherentSpec bad = c;
    bad.sigma = 0;
    EXPECT_THROW(coherent_state(bad, MBasisSpec(60, 0, 0)), DomainError);
}

TEST(CoherentState, EqualsDisplacedOriginState) {
    const MBasisSpec b(20, 0, 0);
    const RotorState origin = coherent_state(at(0.0, 0, 2.0), b);
    for (const auto& [angle, m] : {std::pair{kPi, 3}, std::pair{0.7, -2}, std::pair{5.0, 0}}) {
        const CVector moved = displacement_matrix({{angle, 0, 0}, {m, 0, 0}}, b).matrix() * origin.coefficients();
        const CVector direct = coherent_state(at(angle, m, 2.0), b).coefficients();
        for (int i = 5; i < 36; ++i) EXPECT_LT(std::abs(moved[i] - direct[i]), 1e-12);
    }
}

TEST(CoherentState, OtherAxesAndBystanders) {
    CoherentSpec c = at(0.5, 1, 1.0);
    c.axis = Axis::gamma;
    c.bystander = {2, -1, 0};
    const MBasisSpec b(2, 1, required_window(c));
    const RotorState s = coherent_state(c, b);
    for (std::size_t i = 0; i < b.dimension(); ++i) {
        const MomentumTriple m = b.triple(i);
        if (m.m_alpha != 2 || m.m_beta != -1) { EXPECT_EQ(s.coefficients()[static_cast<Eigen::Index>(i)], cplx(0.0)); }
    }
}

TEST(Superpose, SingleStateAndErrors) {
    const MBasisSpec b(8, 0, 0);
    const RotorState a = coherent_state(at(1.0, 1), b);
    EXPECT_LT((superpose({a}, {1.0}).coefficients() - a.coefficients()).norm(), 1e-15);
    EXPECT_THROW(superpose({a}, {0.0}), DomainError);
    EXPECT_THROW(superpose({a, coherent_state(at(1.0, 1), MBasisSpec(9, 0, 0))}, {1.0, 1.0}), DomainError);
    EXPECT_THROW(superpose({}, {}), DomainError);
}

TEST(Superpose, FarSeparatedComponentsAreOrthogonal) {
    const MBasisSpec b(30, 0, 0);
    const CVector sum = (coherent_state(at(kPi, 20), b).coefficients() + coherent_state(at(kPi, -20), b).coefficients()) /
                        std::sqrt(2.0);
    EXPECT_NEAR(sum.norm(), 1.0, 1e-6);
}

TEST(Wigner, WideCoherentStatePeaksAtItsCenter) {
    const CoherentSpec c = at(kPi, 10, 7.0);
    const RotorState s = coherent_state(c, MBasisSpec(required_window(c), 0, 0));
    const PhaseSpaceGrid W = alpha_slice(s, 64, 52);
    const auto best = std::max_element(W.values().begin(), W.values().end()) - W.values().begin();
    const auto m = W.spec().momenta.at(static_cast<std::size_t>(best) / W.n_angles());
    const auto a = W.spec().angles.at(static_cast<std::size_t>(best) % W.n_angles());
    EXPECT_EQ(m.m_alpha, 10);
    EXPECT_NEAR(a.alpha(), kPi, 1e-12);
    const NegativityReport neg = negativity_volume(W);
    EXPECT_LT(std::abs(neg.min_over_max), 0.05);
}

TEST(Fringes, CountIsTwiceTheHalfSeparation) {
    for (int k : {2, 3, 4}) {
        const RotorState s = cat_state(k, MBasisSpec(k + 6, 0, 0));
        EXPECT_EQ(count_fringes(alpha_slice(s), {0, 0, 0}), 2 * k) << "k = " << k;
    }
}

TEST(Fringes, SingleCoherentStateHasOnePeak) {
    const RotorState s = coherent_state(at(kPi, 3), MBasisSpec(9, 0, 0));
    EXPECT_EQ(count_fringes(alpha_slice(s, 256, 9), {3, 0, 0}), 1);
    EXPECT_THROW(count_fringes(alpha_slice(s, 16, 2), {5, 0, 0}), DomainError);
}

TEST(Fringes, ProminenceRuleOnSequences) {
    std::vector<double> v(64);
    for (int j = 0; j < 64; ++j) v[j] = std::cos(2 * kPi * 5 * j / 64) + 0.01 * std::cos(2 * kPi * 31 * j / 64);
    EXPECT_EQ(count_prominent_maxima(v), 5);
    EXPECT_EQ(count_prominent_maxima(std::vector<double>(16, 1.0)), 0);
}

TEST(Negativity, EigenstateIsZeroAndCatIsNegative) {
    const MBasisSpec b(3, 0, 0);
    CVector c = CVector::Zero(7);
    c[4] = 1.0;
    const NegativityReport e = negativity_volume(alpha_slice(RotorState::pure(b, c), 16, 3));
    EXPECT_EQ(e.volume, 0.0);
    EXPECT_EQ(e.min_over_max, 0.0);
    const NegativityReport cat = negativity_volume(alpha_slice(cat_state(4, MBasisSpec(10, 0, 0)), 128, 10));
    EXPECT_GT(cat.volume, 1e-3);
    EXPECT_LT(cat.min_over_max, -0.1);
}
