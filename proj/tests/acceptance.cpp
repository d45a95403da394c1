// Acceptance run: one PASS/FAIL line per criterion at the stated tolerance.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "orient/canonical.hpp"
#include "orient/classical.hpp"
#include "orient/dynamics.hpp"
#include "orient/error.hpp"
#include "orient/phase_space.hpp"
#include "orient/states.hpp"

using namespace orient;

namespace {

using Rng = std::mt19937_64;

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double max_diff(const PhaseSpaceGrid& a, const PhaseSpaceGrid& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.values().size(); ++i) d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
    return d;
}

CoherentSpec coherent(double angle, int m, double sigma, Axis axis = Axis::alpha) {
    CoherentSpec c;
    c.axis = axis;
    c.sigma = sigma;
    c.center_angle = angle;
    c.center_m = m;
    return c;
}

RotorState ket(const JKMBasisSpec& b, const JKM& q) {
    CVector c = CVector::Zero(static_cast<Eigen::Index>(b.dimension()));
    c[static_cast<Eigen::Index>(b.index(q))] = 1.0;
    return RotorState::pure(b, c);
}

PulseConfig kick_with_area(double area) {
    PulseConfig p;
    p.duration = 1e-3;
    p.strength = 1.0;
    p.strength = area / p.area();
    return p;
}

// 1. Normalization and realness on randomized coherent, superposed and kicked states.
Outcome normalization_and_realness() {
    Rng rng(101);
    double worst_norm = 0, worst_imag = 0, worst_lost = 0;
    auto account = [&](const PhaseSpaceGrid& W) {
        worst_norm = std::max(worst_norm, std::abs(normalization(W) - 1.0));
        worst_imag = std::max(worst_imag, W.diagnostics.max_imag_residue);
    };
    for (int i = 0; i < 4; ++i) {
        const Axis axis = i % 2 ? Axis::gamma : Axis::alpha;
        CoherentSpec c = coherent(uniform(rng, 0, 2 * kPi), uniform_int(rng, -5, 5), uniform(rng, 0.5, 3), axis);
        const int L = required_window(c);
        const MBasisSpec b = axis == Axis::alpha ? MBasisSpec(L, 0, 0) : MBasisSpec(0, 0, L);
        const AngleGrid g = axis == Axis::alpha ? AngleGrid{4 * L + 4, 1, 1} : AngleGrid{1, 1, 4 * L + 4};
        const MomentumWindow w = axis == Axis::alpha ? MomentumWindow::symmetric(L, 0, 0) : MomentumWindow::symmetric(0, 0, L);
        account(wigner_from_m_basis(coherent_state(c, b), {g, w}));
    }
    for (int i = 0; i < 3; ++i) {
        const MBasisSpec b(16, 0, 0);
        std::vector<RotorState> parts;
        std::vector<cplx> weights;
        for (int k = 0; k < 2 + i % 2; ++k) {
            parts.push_back(coherent_state(coherent(uniform(rng, 0, 2 * kPi), uniform_int(rng, -6, 6), uniform(rng, 0.7, 1.5)), b));
            weights.emplace_back(uniform(rng, -1, 1), uniform(rng, -1, 1));
        }
        account(wigner_from_m_basis(superpose(parts, weights), {{68, 1, 1}, MomentumWindow::symmetric(16, 0, 0)}));
    }
    // Kicked states live in the K = M = 0 block so their m-basis image needs only the beta axis.
    const int L = 128;
    for (int i = 0; i < 3; ++i) {
        const JKMBasisSpec jb(16, std::pair{0, 0});
        const RotorState s0 = ket(jb, {uniform_int(rng, 0, 3), 0, 0});
        KickReport report;
        const RotorState kicked =
            free_propagate(propagate_kick(s0, kick_with_area(uniform(rng, -6, -2)), TopConstants{}, 1e-10, &report),
                           uniform(rng, 0, 1), TopConstants{});
        double captured = 0;
        const RotorState m = convert_to_m_basis(kicked, MBasisSpec(0, L, 0), 0, &captured);
        worst_lost = std::max(worst_lost, 1.0 - captured);
        account(wigner_from_m_basis(m, {{1, 4 * L + 4, 1}, MomentumWindow::symmetric(0, 2 * L, 0)}));
    }
    return {worst_norm < 1e-6 && worst_imag < 1e-10,
            "max |norm - 1| " + fmt(worst_norm) + " (tol 1e-6), max imag residue " + fmt(worst_imag) +
                " (tol 1e-10), kicked-state m-window loss " + fmt(worst_lost)};
}

// 2. Angle and momentum marginals against directly computed densities.
Outcome marginal_identities() {
    double wide_angle = 0, wide_mom = 0, top_angle = 0, top_mom = 0;
    {
        const CoherentSpec c = coherent(kPi, 10, 7.0);
        const RotorState s = coherent_state(c, MBasisSpec(required_window(c), 0, 0));
        const PhaseSpaceGrid W = wigner_from_m_basis(s, {{64, 1, 1}, MomentumWindow::symmetric(60, 0, 0)});
        const Marginals m = marginals(W);
        const double norm = theta3(std::exp(-2.0 / 49));
        for (std::size_t k = 0; k < W.n_momenta(); ++k) {
            const int ma = W.spec().momenta.at(k).m_alpha;
            wide_mom = std::max(wide_mom, std::abs(m.momentum[k] - std::exp(-2.0 * (ma - 10) * (ma - 10) / 49) / norm));
        }
        for (std::size_t a = 0; a < W.n_angles(); ++a) {
            wide_angle = std::max(wide_angle, std::abs(m.angle[a] - angle_density(s, W.spec().angles.at(a))));
        }
    }
    {
        const JKM q{3, 3, 3};
        const RotorState s = ket(JKMBasisSpec(3, std::pair{3, 3}), q);
        auto window = [](int l) {
            MomentumWindow w;
            w.lo = {3, -l, 3};
            w.hi = {3, l, 3};
            return w;
        };
        const int l = 40;
        const PhaseSpaceGrid Wm = wigner_from_angle_basis(s, {{1, 256, 1}, window(l)});
        const Marginals mm = marginals(Wm);
        const auto column = basis_overlap_column(q, l);
        for (std::size_t k = 0; k < Wm.n_momenta(); ++k) {
            const double want = std::norm(column[static_cast<std::size_t>(Wm.spec().momenta.at(k).m_beta + l)]);
            top_mom = std::max(top_mom, std::abs(mm.momentum[k] - want));
        }
        const PhaseSpaceGrid Wa = wigner_from_angle_basis(s, {{1, 16, 1}, window(1000)});
        const Marginals ma = marginals(Wa);
        for (std::size_t a = 0; a < Wa.n_angles(); ++a) {
            top_angle = std::max(top_angle, std::abs(ma.angle[a] - angle_density(s, Wa.spec().angles.at(a))));
        }
    }
    const double worst = std::max({wide_angle, wide_mom, top_angle, top_mom});
    return {worst < 1e-6, "sigma=7 coherent angle " + fmt(wide_angle) + " momentum " + fmt(wide_mom) + "; |333> angle " +
                              fmt(top_angle) + " momentum " + fmt(top_mom) + " (tol 1e-6)"};
}

// 3. Momentum eigenstates give a flat slice at their momentum and zero elsewhere.
Outcome momentum_eigenstates() {
    const MBasisSpec b(2, 2, 2);
    const double level = 1 / (4 * kPi * kPi * kPi);
    double worst = 0;
    for (const MomentumTriple m0 : {MomentumTriple{0, 0, 0}, MomentumTriple{1, -2, 2}, MomentumTriple{-2, 1, 0}}) {
        CVector c = CVector::Zero(static_cast<Eigen::Index>(b.dimension()));
        c[static_cast<Eigen::Index>(b.index(m0))] = 1.0;
        const PhaseSpaceGrid W =
            wigner_from_m_basis(RotorState::pure(b, c), {{5, 7, 5}, MomentumWindow::symmetric(3, 3, 3)});
        for (std::size_t m = 0; m < W.n_momenta(); ++m) {
            const double want = W.spec().momenta.at(m) == m0 ? level : 0.0;
            for (std::size_t a = 0; a < W.n_angles(); ++a) worst = std::max(worst, std::abs(W.at(a, m) - want));
        }
    }
    return {worst <= 4 * std::numeric_limits<double>::epsilon() * level,
            "max |W - delta/(4 pi^3)| " + fmt(worst) + " (tol 4 ulp of 1/(4 pi^3))"};
}

// 4. Fringe counts of two-component superpositions.
Outcome fringe_counts() {
    std::string detail;
    bool ok = true;
    for (int k : {4, 2, 3}) {
        const MBasisSpec b(k + 6, 0, 0);
        const RotorState s = superpose(
            {coherent_state(coherent(kPi, k, 1.0), b), coherent_state(coherent(kPi, -k, 1.0), b)}, {1.0, 1.0});
        const int n = count_fringes(wigner_from_m_basis(s, {{256, 1, 1}, MomentumWindow::symmetric(0, 0, 0)}), {0, 0, 0});
        ok = ok && n == 2 * k;
        detail += "+-" + std::to_string(k) + " -> " + std::to_string(n) + " (want " + std::to_string(2 * k) + ") ";
    }
    return {ok, detail};
}

// 5. Symbols of the angle and momentum operators, and of Weyl-ordered products.
Outcome weyl_correspondence() {
    auto interior_error = [](int n, int m, int L) {
        const MBasisSpec b(L, 0, 0);
        const OperatorMatrix op = weyl_ordered_product(n, m, Axis::alpha, b);
        double worst = 0;
        for (int j = 2; j <= 14; ++j) {
            const double a = 2 * kPi * j / 16;
            for (int ma = -3; ma <= 3; ++ma) {
                const cplx w = weyl_symbol(op, {a, 0, 0}, {ma, 0, 0});
                worst = std::max(worst, std::abs(w - std::pow(a, n) * std::pow(double(ma), m)));
            }
        }
        return worst;
    };
    const double angle = interior_error(1, 0, 64);
    const double momentum = interior_error(0, 1, 64);
    bool shrink = true;
    std::string products;
    for (int n = 1; n <= 2; ++n) {
        for (int m = 0; m <= 2; ++m) {
            if (n == 1 && m == 0) continue;
            const double e32 = interior_error(n, m, 32), e64 = interior_error(n, m, 64);
            shrink = shrink && e32 / e64 >= 2.0;
            products += " a^" + std::to_string(n) + "p^" + std::to_string(m) + " " + fmt(e32) + "->" + fmt(e64);
        }
    }
    const double ratio = interior_error(1, 0, 32) / angle;
    return {angle < 1e-3 && momentum < 1e-3 && shrink && ratio >= 2.0,
            "alpha symbol " + fmt(angle) + ", p_alpha symbol " + fmt(momentum) + " (tol 1e-3 at window 64); alpha 32->64 ratio " +
                fmt(ratio) + ";" + products + " (need ratio >= 2)"};
}

// 6. Symbol covariance under displacements.
Outcome translation_covariance() {
    Rng rng(606);
    const MBasisSpec b(3, 3, 3);
    const MBasisSpec inner(1, 1, 1);
    const auto n = static_cast<Eigen::Index>(b.dimension());
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        CMatrix A = CMatrix::Zero(n, n);
        for (std::size_t r = 0; r < inner.dimension(); ++r)
            for (std::size_t c = 0; c < inner.dimension(); ++c)
                A(static_cast<Eigen::Index>(b.index(inner.triple(r))), static_cast<Eigen::Index>(b.index(inner.triple(c)))) =
                    cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
        const DisplacementSpec s{{uniform(rng, 0, 2 * kPi), uniform(rng, 0, kPi), uniform(rng, 0, 2 * kPi)},
                                 {uniform_int(rng, -1, 1), uniform_int(rng, -1, 1), uniform_int(rng, -1, 1)}};
        const CMatrix D = displacement_matrix(s, b).matrix();
        const EulerAngles w(uniform(rng, 0, 2 * kPi), uniform(rng, 0, kPi), uniform(rng, 0, 2 * kPi));
        const MomentumTriple m{uniform_int(rng, -1, 1), uniform_int(rng, -1, 1), uniform_int(rng, -1, 1)};
        const cplx moved = weyl_symbol(OperatorMatrix(b, D * A * D.adjoint()), w.translated(s.omega), m + s.m);
        worst = std::max(worst, std::abs(moved - weyl_symbol(OperatorMatrix(b, A), w, m)));
    }
    return {worst < 1e-8, "max covariance residual over 20 pairs " + fmt(worst) + " (tol 1e-8)"};
}

// 7. Kernel hermiticity and the inverse Weyl round trip.
Outcome kernel_axioms() {
    Rng rng(707);
    const MBasisSpec b(3, 3, 3);
    double herm = 0;
    for (int i = 0; i < 20; ++i) {
        const EulerAngles w(uniform(rng, 0, 2 * kPi), uniform(rng, 0, kPi), uniform(rng, 0, 2 * kPi));
        const MomentumTriple m{uniform_int(rng, -3, 3), uniform_int(rng, -3, 3), uniform_int(rng, -3, 3)};
        herm = std::max(herm, kernel(w, m, b).hermiticity_residual());
    }
    const MBasisSpec basis(2, 2, 2);
    const MBasisSpec inner(1, 1, 1);
    const auto n = static_cast<Eigen::Index>(basis.dimension());
    double round_trip = 0;
    for (int trial = 0; trial < 3; ++trial) {
        CMatrix A = CMatrix::Zero(n, n);
        for (std::size_t r = 0; r < inner.dimension(); ++r)
            for (std::size_t c = 0; c < inner.dimension(); ++c)
                A(static_cast<Eigen::Index>(basis.index(inner.triple(r))),
                  static_cast<Eigen::Index>(basis.index(inner.triple(c)))) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
        // Grids hold real values, so the operators are Hermitian.
        A = (A + A.adjoint()).eval();
        const PhaseSpaceGrid W = weyl_symbol_grid(OperatorMatrix(basis, A), {{9, 9, 9}, MomentumWindow::symmetric(2, 2, 2)});
        round_trip = std::max(round_trip, (inverse_weyl(W, basis).matrix() - A).cwiseAbs().maxCoeff());
    }
    return {herm < 1e-12 && round_trip < 1e-8,
            "hermiticity " + fmt(herm) + " (tol 1e-12), inverse-Weyl entry error " + fmt(round_trip) + " (tol 1e-8)"};
}

// 8. Quadrature path against the closed-form path.
Outcome path_cross_validation() {
    const RotorState c = coherent_state(coherent(kPi, 4, 1.0), MBasisSpec(12, 0, 0));
    const GridSpec cs{{32, 2, 1}, MomentumWindow::symmetric(16, 0, 0)};
    const double coh = max_diff(wigner_from_m_basis(c, cs), wigner_from_angle_basis(c, cs));
    const RotorState j = ket(JKMBasisSpec(2, std::pair{0, 0}), {2, 0, 0});
    const GridSpec js{{2, 8, 2}, MomentumWindow::symmetric(0, 6, 0)};
    const double j2 = max_diff(wigner_from_angle_basis(j, js), wigner_from_m_basis(convert_to_m_basis(j, MBasisSpec(0, 128, 0)), js));
    return {std::max(coh, j2) < 1e-6, "coherent " + fmt(coh) + ", |200> " + fmt(j2) + " (tol 1e-6)"};
}

// 9. Alignment after the kick, revival at pi, recurrence at 2 pi.
Outcome alignment_dynamics() {
    const auto start = std::chrono::steady_clock::now();
    AlignmentConfig cfg;
    cfg.pulse = kick_with_area(-10.0);
    std::vector<double> deltas;
    for (int i = 1; i <= 20; ++i) deltas.push_back(0.01 * i);
    for (double d : deltas) cfg.times.push_back(d);
    for (double d : deltas) cfg.times.push_back(kPi + d);
    const AlignmentResult r = run_alignment(cfg);
    const bool aligned = r.post_kick_signal > r.pre_kick_signal;
    double revival = 0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        revival = std::max(revival, std::abs(r.signal[i + deltas.size()] - r.signal[i]));
    }
    const RotorState later = free_propagate(*r.post_kick, 0.4, cfg.constants);
    const double recurrence = std::abs(1.0 - fidelity(free_propagate(later, 2 * kPi, cfg.constants), later));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {aligned && revival < 1e-6 && recurrence < 1e-10 && seconds < 60,
            "(a) pre " + fmt(r.pre_kick_signal) + " post " + fmt(r.post_kick_signal) + "; (b) max |s(pi+d) - s(d)| " +
                fmt(revival) + " (tol 1e-6); (c) |1 - F(2 pi)| " + fmt(recurrence) + " (tol 1e-10); " + fmt(seconds) + " s"};
}

// 10. Classical characteristics against Hamilton's equations, and conservation along paths.
Outcome classical_limit() {
    Rng rng(1010);
    TopConstants k;
    k.C = 0.8;
    const double h = 2e-4;
    auto fd = [&](ClassicalState s, double ClassicalState::*field) {
        const double x = s.*field;
        const double w[4] = {1, -8, 8, -1}, off[4] = {-2, -1, 1, 2};
        double acc = 0;
        for (int i = 0; i < 4; ++i) {
            s.*field = x + off[i] * h;
            acc += w[i] * classical_hamiltonian(s, k);
        }
        return acc / (12 * h);
    };
    double field = 0;
    for (int i = 0; i < 100; ++i) {
        const ClassicalState s{uniform(rng, 0, 2 * kPi), uniform(rng, 0.3, kPi - 0.3), uniform(rng, 0, 2 * kPi),
                               uniform(rng, -3, 3),      uniform(rng, -3, 3),           uniform(rng, -3, 3)};
        const ClassicalDerivative d = classical_vector_field(s, k);
        for (double e : {d.alpha - fd(s, &ClassicalState::p_alpha), d.beta - fd(s, &ClassicalState::p_beta),
                         d.gamma - fd(s, &ClassicalState::p_gamma), d.p_alpha + fd(s, &ClassicalState::alpha),
                         d.p_beta + fd(s, &ClassicalState::beta), d.p_gamma + fd(s, &ClassicalState::gamma)}) {
            field = std::max(field, std::abs(e));
        }
    }
    double drift = 0, cyclic = 0;
    for (int i = 0; i < 10; ++i) {
        const ClassicalState s0{uniform(rng, 0, 2 * kPi), uniform(rng, 0.5, kPi - 0.5), uniform(rng, 0, 2 * kPi),
                                uniform(rng, -2, 2),      uniform(rng, -2, 2),           uniform(rng, -2, 2)};
        const ClassicalPath path = classical_trajectory(s0, 10.0, k);
        if (path.truncated) continue;
        const double e0 = classical_hamiltonian(s0, k);
        for (const ClassicalState& s : path.states) {
            drift = std::max(drift, std::abs(classical_hamiltonian(s, k) - e0) / std::abs(e0));
            cyclic = std::max({cyclic, std::abs(s.p_alpha - s0.p_alpha), std::abs(s.p_gamma - s0.p_gamma)});
        }
    }
    return {field < 1e-9 && drift < 1e-9 && cyclic < 1e-9,
            "vector field vs FD " + fmt(field) + " (tol 1e-9); energy drift " + fmt(drift) + ", cyclic momenta " +
                fmt(cyclic) + " (tol 1e-9)"};
}

// 11. Canonical Hamiltonian spectrum approaches the symmetric-top energies.
Outcome canonical_spectrum(const TopConstants& k) {
    const CanonicalReport r8 = canonical_hamiltonian_check(8, k);
    const CanonicalReport r12 = canonical_hamiltonian_check(12, k);
    const double ratio = r8.discrepancy / r12.discrepancy;
    return {ratio >= 2.0, "A=" + fmt(k.A) + " C=" + fmt(k.C) + ": discrepancy " + fmt(r8.discrepancy) + " -> " +
                              fmt(r12.discrepancy) + ", ratio " + fmt(ratio) + " (need >= 2); offset without potential " +
                              fmt(r12.potential_offset)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"normalization and realness", normalization_and_realness},
        {"marginal identities", marginal_identities},
        {"momentum-eigenstate exactness", momentum_eigenstates},
        {"fringe count", fringe_counts},
        {"Weyl correspondence", weyl_correspondence},
        {"translation covariance", translation_covariance},
        {"kernel axioms", kernel_axioms},
        {"Wigner path cross-validation", path_cross_validation},
        {"alignment dynamics", alignment_dynamics},
        {"classical limit", classical_limit},
        {"canonical Hamiltonian spectrum", [] { return canonical_spectrum(TopConstants{}); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s [%zu] %s: %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), s);
        std::fflush(stdout);
        failed += !o.passed;
    }
    for (double C : {1.0, 0.25}) {
        TopConstants k;
        k.C = C;
        const Outcome o = canonical_spectrum(k);
        std::printf("INFO [11] %s %s\n", o.passed ? "holds" : "does not hold", o.detail.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
