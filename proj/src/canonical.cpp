#include "orient/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "orient/error.hpp"

namespace orient {

namespace {

// Eigenvalues of one (m_alpha, m_gamma) block, with or without the quantum potential.
// In the sqrt(sin b)-weighted representation the momentum-basis functions are exp(2 i m b); on the
// N = 2L + 1 point grid b_j = (j + 1/2) pi / N they are related to grid values by a unitary DFT.
// p_beta^2 - (1 + csc^2)/4 is written as B^dagger B with B = i p_beta - cot(b)/2, which keeps the
// discretized operator positive.
std::pair<Eigen::VectorXd, Eigen::VectorXd> block_spectrum(int L, int ma, int mg, const TopConstants& k) {
    const int N = 2 * L + 1;
    CMatrix F(N, N);
    Eigen::VectorXd b(N);
    for (int j = 0; j < N; ++j) {
        b[j] = (j + 0.5) * kPi / N;
        for (int m = -L; m <= L; ++m) {
            F(j, m + L) = std::polar(1.0 / std::sqrt(static_cast<double>(N)), 2.0 * m * b[j]);
        }
    }
    auto grid_op = [&](const Eigen::VectorXd& diag) -> CMatrix {
        return F.adjoint() * diag.cast<cplx>().asDiagonal() * F;
    };
    Eigen::VectorXd cot(N), cent(N), qp(N);
    for (int j = 0; j < N; ++j) {
        const double s = std::sin(b[j]);
        const double c = std::cos(b[j]);
        cot[j] = c / s;
        const double u = ma - mg * c;
        cent[j] = u * u / (s * s);
        qp[j] = 0.25 * (1.0 + 1.0 / (s * s));
    }
    CMatrix B = grid_op(-0.5 * cot);
    for (int m = -L; m <= L; ++m) {
        B(m + L, m + L) += cplx(0.0, 2.0 * m);
    }
    const double I1 = k.I1();
    CMatrix H = (B.adjoint() * B + grid_op(cent)) / (2.0 * I1);
    H.diagonal().array() += mg * mg / (2.0 * k.I3());
    H = 0.5 * (H + H.adjoint()).eval();
    CMatrix H0 = H + grid_op(qp) / (2.0 * I1);
    H0 = 0.5 * (H0 + H0.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> e1(H, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<CMatrix> e2(H0, Eigen::EigenvaluesOnly);
    return {e1.eigenvalues(), e2.eigenvalues()};
}

}  // namespace

CanonicalReport canonical_hamiltonian_check(int m_max, const TopConstants& k, int n_levels) {
    k.check();
    if (m_max < 1 || m_max > 32) {
        throw ConfigError("canonical check window must satisfy 1 <= m_max <= 32");
    }
    if (n_levels < 1) {
        throw DomainError("n_levels must be positive");
    }
    CanonicalReport r;
    r.m_max = m_max;
    r.n_levels = n_levels;
    std::vector<double> all, all0, exact;
    for (int ma = -m_max; ma <= m_max; ++ma) {
        for (int mg = -m_max; mg <= m_max; ++mg) {
            const auto [ev, ev0] = block_spectrum(m_max, ma, mg, k);
            CanonicalBlock blk;
            blk.m_alpha = ma;
            blk.m_gamma = mg;
            const int J0 = std::max(std::abs(ma), std::abs(mg));
            const int n = std::min<int>(n_levels, static_cast<int>(ev.size()));
            for (int i = 0; i < n; ++i) {
                blk.computed.push_back(ev[i]);
                const int J = J0 + i;
                blk.exact.push_back(k.A * J * (J + 1.0) + (k.C - k.A) * mg * mg);
                blk.max_error = std::max(blk.max_error, std::abs(blk.computed.back() - blk.exact.back()));
            }
            all.insert(all.end(), ev.data(), ev.data() + ev.size());
            all0.insert(all0.end(), ev0.data(), ev0.data() + ev0.size());
            for (int J = J0; J < J0 + static_cast<int>(ev.size()); ++J) {
                exact.push_back(k.A * J * (J + 1.0) + (k.C - k.A) * mg * mg);
            }
            r.blocks.push_back(std::move(blk));
        }
    }
    std::sort(all.begin(), all.end());
    std::sort(all0.begin(), all0.end());
    std::sort(exact.begin(), exact.end());
    for (int i = 0; i < n_levels; ++i) {
        r.computed.push_back(all[i]);
        r.computed_without_potential.push_back(all0[i]);
        r.exact.push_back(exact[i]);
        r.discrepancy = std::max(r.discrepancy, std::abs(all[i] - exact[i]));
        r.discrepancy_without_potential = std::max(r.discrepancy_without_potential, std::abs(all0[i] - exact[i]));
        r.potential_offset += (all0[i] - exact[i]) / n_levels;
    }
    return r;
}

}  // namespace orient
