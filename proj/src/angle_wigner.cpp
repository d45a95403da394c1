#include <algorithm>
#include <cmath>
#include <map>

#include "orient/error.hpp"
#include "orient/phase_space.hpp"
#include "orient/quadrature.hpp"
#include "orient/wigner_d.hpp"

namespace orient {

namespace {

constexpr double kInvVolume = 1.0 / (4.0 * kPi * kPi * kPi);

struct Block {
    int K = 0;
    int M = 0;
    std::vector<int> J;             // J values present
    std::vector<std::size_t> index;  // basis indices
};

int max_abs_k(const MomentumWindow& w, Axis a) {
    const int i = axis_index(a);
    return std::max(std::abs(w.lo[i]), std::abs(w.hi[i]));
}

PhaseSpaceGrid angle_path_jkm(const RotorState& state, const GridSpec& spec, const AngleQuadrature& quad) {
    const JKMBasisSpec& basis = state.jkm_basis();
    const CMatrix rho = state.density();
    std::map<std::pair<int, int>, Block> by_km;
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const JKM& q = basis.entry(i);
        Block& b = by_km[{q.K, q.M}];
        b.K = q.K;
        b.M = q.M;
        b.J.push_back(q.J);
        b.index.push_back(i);
    }
    std::vector<Block> blocks;
    for (auto& [key, b] : by_km) {
        blocks.push_back(std::move(b));
    }
    struct Pair {
        std::size_t b1, b2;
        Eigen::MatrixXcd sub;  // rho restricted, already scaled by N_J N_J'
    };
    std::vector<Pair> pairs;
    for (std::size_t p = 0; p < blocks.size(); ++p) {
        for (std::size_t q = 0; q < blocks.size(); ++q) {
            Eigen::MatrixXcd sub(blocks[p].J.size(), blocks[q].J.size());
            bool any = false;
            for (std::size_t r = 0; r < blocks[p].J.size(); ++r) {
                for (std::size_t c = 0; c < blocks[q].J.size(); ++c) {
                    const cplx v = rho(static_cast<Eigen::Index>(blocks[p].index[r]),
                                       static_cast<Eigen::Index>(blocks[q].index[c]));
                    const double n1 = std::sqrt((2.0 * blocks[p].J[r] + 1.0) / (8.0 * kPi * kPi));
                    const double n2 = std::sqrt((2.0 * blocks[q].J[c] + 1.0) / (8.0 * kPi * kPi));
                    sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v * n1 * n2;
                    any = any || v != 0.0;
                }
            }
            if (any) {
                pairs.push_back({p, q, std::move(sub)});
            }
        }
    }

    const AngleGrid& ag = spec.angles;
    const MomentumWindow& mw = spec.momenta;
    const int nkb = mw.count(Axis::beta);
    const int kmax = max_abs_k(mw, Axis::beta);
    const int jmax = basis.j_max();

    // I[pair][beta_j][k_beta]
    std::vector<cplx> I(pairs.size() * ag.n_beta * nkb, cplx(0.0));
    int used_order = quad.order;
#pragma omp parallel for schedule(dynamic) reduction(max : used_order)
    for (int jb = 0; jb < ag.n_beta; ++jb) {
        const double beta = ag.point(Axis::beta, jb);
        const double h = 0.5 * kPi;
        const std::vector<double> breaks{2.0 * beta, -2.0 * beta, 2.0 * beta - 2.0 * kPi, 2.0 * kPi - 2.0 * beta};
        std::vector<double> edges{-h};
        for (double x : breaks) {
            if (x > -h + 1e-14 && x < h - 1e-14) edges.push_back(x);
        }
        edges.push_back(h);
        std::sort(edges.begin(), edges.end());
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            const double len = edges[e + 1] - edges[e];
            if (len < 1e-14) continue;
            const int order = std::max(quad.order, static_cast<int>(std::ceil(1.2 * kmax * len)) + 2 * jmax + 64);
            used_order = std::max(used_order, order);
            const QuadratureRule rule = cosine_gauss_legendre(order, edges[e], edges[e + 1]);
            std::vector<std::vector<double>> dm(blocks.size()), dp(blocks.size());
            for (std::size_t n = 0; n < rule.size(); ++n) {
                const double x = rule.nodes[n];
                const double bm = wrap_angle(beta - 0.5 * x, kPi);
                const double bp = wrap_angle(beta + 0.5 * x, kPi);
                const double root = std::sqrt(std::abs(std::sin(bm) * std::sin(bp)));
                if (root == 0.0) continue;
                for (std::size_t b = 0; b < blocks.size(); ++b) {
                    dm[b] = wigner_small_d_column(jmax, blocks[b].M, blocks[b].K, bm);
                    dp[b] = wigner_small_d_column(jmax, blocks[b].M, blocks[b].K, bp);
                }
                const double w = rule.weights[n] * root;
                const cplx step = std::polar(1.0, 2.0 * x);
                const cplx start = std::polar(1.0, 2.0 * mw.lo[1] * x);
                for (std::size_t p = 0; p < pairs.size(); ++p) {
                    const Block& b1 = blocks[pairs[p].b1];
                    const Block& b2 = blocks[pairs[p].b2];
                    cplx g = 0.0;
                    for (std::size_t r = 0; r < b1.J.size(); ++r) {
                        const double v1 = dm[pairs[p].b1][b1.J[r]];
                        if (v1 == 0.0) continue;
                        for (std::size_t c = 0; c < b2.J.size(); ++c) {
                            g += pairs[p].sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * v1 *
                                 dp[pairs[p].b2][b2.J[c]];
                        }
                    }
                    if (g == 0.0) continue;
                    g *= w;
                    cplx ph = start;
                    cplx* dst = &I[(p * ag.n_beta + jb) * nkb];
                    for (int k = 0; k < nkb; ++k) {
                        dst[k] += g * ph;
                        ph *= step;
                    }
                }
            }
        }
    }

    PhaseSpaceGrid g(spec);
    double max_imag = 0.0;
    const double two_pi_sq = 4.0 * kPi * kPi;
    for (std::size_t m = 0; m < mw.size(); ++m) {
        const MomentumTriple k = mw.at(m);
        const int kb = k.m_beta - mw.lo[1];
        for (std::size_t a = 0; a < ag.size(); ++a) {
            const auto j = ag.split(a);
            const double al = ag.point(Axis::alpha, j[0]);
            const double ga = ag.point(Axis::gamma, j[2]);
            cplx acc = 0.0;
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                const Block& b1 = blocks[pairs[p].b1];
                const Block& b2 = blocks[pairs[p].b2];
                const double s = half_sinc(k.m_alpha, b1.M + b2.M) * half_sinc(k.m_gamma, b1.K + b2.K);
                if (s == 0.0) continue;
                acc += s * std::polar(1.0, (b1.M - b2.M) * al + (b1.K - b2.K) * ga) *
                       I[(p * ag.n_beta + j[1]) * nkb + kb];
            }
            acc *= two_pi_sq * kInvVolume;
            g.at(a, m) = acc.real();
            max_imag = std::max(max_imag, std::abs(acc.imag()));
        }
    }
    g.diagnostics.max_imag_residue = max_imag;
    g.diagnostics.beta_order = used_order;
    return g;
}

// Evaluates psi~(theta) = sum_a c_a prod_i exp(i phi_i a_i theta_i) on a tensor grid of per-axis arguments.
std::vector<cplx> tensor_eval(const MBasisSpec& basis, const CVector& c,
                              const std::array<std::vector<double>, 3>& args) {
    std::array<int, 3> w{}, n{};
    for (Axis ax : kAxes) {
        w[axis_index(ax)] = basis.width(ax);
        n[axis_index(ax)] = static_cast<int>(args[axis_index(ax)].size());
    }
    std::array<std::vector<cplx>, 3> E;
    for (Axis ax : kAxes) {
        const int i = axis_index(ax);
        const double phi = axis_phase_factor(ax);
        E[i].resize(static_cast<std::size_t>(w[i]) * n[i]);
        for (int a = 0; a < w[i]; ++a) {
            for (int q = 0; q < n[i]; ++q) {
                E[i][static_cast<std::size_t>(a) * n[i] + q] = std::polar(1.0, phi * (a - basis.m_max(ax)) * args[i][q]);
            }
        }
    }
    // c[a0][a1][a2] -> T1[q0][a1][a2] -> T2[q0][q1][a2] -> T3[q0][q1][q2]
    std::vector<cplx> T1(static_cast<std::size_t>(n[0]) * w[1] * w[2], cplx(0.0));
    for (int a0 = 0; a0 < w[0]; ++a0) {
        for (int q0 = 0; q0 < n[0]; ++q0) {
            const cplx e = E[0][static_cast<std::size_t>(a0) * n[0] + q0];
            for (std::size_t r = 0; r < static_cast<std::size_t>(w[1]) * w[2]; ++r) {
                T1[static_cast<std::size_t>(q0) * w[1] * w[2] + r] +=
                    e * c[static_cast<Eigen::Index>(static_cast<std::size_t>(a0) * w[1] * w[2] + r)];
            }
        }
    }
    std::vector<cplx> T2(static_cast<std::size_t>(n[0]) * n[1] * w[2], cplx(0.0));
    for (int q0 = 0; q0 < n[0]; ++q0) {
        for (int a1 = 0; a1 < w[1]; ++a1) {
            for (int q1 = 0; q1 < n[1]; ++q1) {
                const cplx e = E[1][static_cast<std::size_t>(a1) * n[1] + q1];
                for (int a2 = 0; a2 < w[2]; ++a2) {
                    T2[(static_cast<std::size_t>(q0) * n[1] + q1) * w[2] + a2] +=
                        e * T1[(static_cast<std::size_t>(q0) * w[1] + a1) * w[2] + a2];
                }
            }
        }
    }
    std::vector<cplx> T3(static_cast<std::size_t>(n[0]) * n[1] * n[2], cplx(0.0));
    for (std::size_t q01 = 0; q01 < static_cast<std::size_t>(n[0]) * n[1]; ++q01) {
        for (int a2 = 0; a2 < w[2]; ++a2) {
            const cplx t = T2[q01 * w[2] + a2];
            if (t == 0.0) continue;
            for (int q2 = 0; q2 < n[2]; ++q2) {
                T3[q01 * n[2] + q2] += t * E[2][static_cast<std::size_t>(a2) * n[2] + q2];
            }
        }
    }
    return T3;
}

PhaseSpaceGrid angle_path_m(const RotorState& state, const GridSpec& spec) {
    const MBasisSpec& basis = state.m_basis();
    std::vector<std::pair<double, CVector>> components;
    if (state.is_pure()) {
        components.emplace_back(1.0, state.coefficients());
    } else {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(state.density());
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            if (std::abs(es.eigenvalues()[i]) > 1e-15) {
                components.emplace_back(es.eigenvalues()[i], es.eigenvectors().col(i));
            }
        }
    }
    const AngleGrid& ag = spec.angles;
    const MomentumWindow& mw = spec.momenta;
    std::array<QuadratureRule, 3> rules;
    std::array<int, 3> orders{};
    for (Axis ax : kAxes) {
        const int i = axis_index(ax);
        const double half = 0.5 * axis_period(ax);
        const int z = max_abs_k(mw, ax) + basis.m_max(ax);
        orders[i] = std::max(AngleQuadrature::kMinimumOrder, static_cast<int>(std::ceil(1.2 * kPi * z)) + 16);
        rules[i] = gauss_legendre(orders[i], -half, half);
    }
    PhaseSpaceGrid g(spec);
    double max_imag = 0.0;
    const std::size_t nq = rules[0].size() * rules[1].size() * rules[2].size();
    const std::size_t n_mom = mw.size();
#pragma omp parallel for schedule(dynamic) reduction(max : max_imag)
    for (std::size_t p = 0; p < ag.size(); ++p) {
        const EulerAngles th = ag.at(p);
        std::array<std::vector<double>, 3> minus, plus;
        for (Axis ax : kAxes) {
            const int i = axis_index(ax);
            for (double x : rules[i].nodes) {
                minus[i].push_back(th[ax] - 0.5 * x);
                plus[i].push_back(th[ax] + 0.5 * x);
            }
        }
        std::vector<cplx> G(nq, cplx(0.0));
        for (const auto& [lambda, c] : components) {
            const std::vector<cplx> a = tensor_eval(basis, c, minus);
            const std::vector<cplx> b = tensor_eval(basis, c, plus);
            for (std::size_t q = 0; q < nq; ++q) {
                G[q] += lambda * a[q] * std::conj(b[q]);
            }
        }
        // Weighted Fourier transform at integer momenta, axis by axis.
        std::array<int, 3> nn{static_cast<int>(rules[0].size()), static_cast<int>(rules[1].size()),
                              static_cast<int>(rules[2].size())};
        std::array<int, 3> nk{mw.count(Axis::alpha), mw.count(Axis::beta), mw.count(Axis::gamma)};
        std::array<std::vector<cplx>, 3> F;
        for (Axis ax : kAxes) {
            const int i = axis_index(ax);
            F[i].resize(static_cast<std::size_t>(nk[i]) * nn[i]);
            for (int k = 0; k < nk[i]; ++k) {
                for (int q = 0; q < nn[i]; ++q) {
                    F[i][static_cast<std::size_t>(k) * nn[i] + q] =
                        rules[i].weights[q] *
                        std::polar(1.0, axis_phase_factor(ax) * (mw.lo[i] + k) * rules[i].nodes[q]);
                }
            }
        }
        // Contract gamma, then beta, then alpha: G[q0][q1][q2] -> H1[q0][q1][k2] -> H2[q0][k1][k2] -> W[k0][k1][k2].
        std::vector<cplx> H1(static_cast<std::size_t>(nn[0]) * nn[1] * nk[2], cplx(0.0));
        for (std::size_t q01 = 0; q01 < static_cast<std::size_t>(nn[0]) * nn[1]; ++q01) {
            const cplx* src = &G[q01 * nn[2]];
            for (int k = 0; k < nk[2]; ++k) {
                const cplx* f = &F[2][static_cast<std::size_t>(k) * nn[2]];
                cplx acc = 0.0;
                for (int q = 0; q < nn[2]; ++q) acc += f[q] * src[q];
                H1[q01 * nk[2] + k] = acc;
            }
        }
        std::vector<cplx> H2(static_cast<std::size_t>(nn[0]) * nk[1] * nk[2], cplx(0.0));
        for (int q0 = 0; q0 < nn[0]; ++q0) {
            for (int k = 0; k < nk[1]; ++k) {
                cplx* dst = &H2[(static_cast<std::size_t>(q0) * nk[1] + k) * nk[2]];
                for (int q = 0; q < nn[1]; ++q) {
                    const cplx f = F[1][static_cast<std::size_t>(k) * nn[1] + q];
                    const cplx* src = &H1[(static_cast<std::size_t>(q0) * nn[1] + q) * nk[2]];
                    for (int r = 0; r < nk[2]; ++r) dst[r] += f * src[r];
                }
            }
        }
        const std::size_t n12 = static_cast<std::size_t>(nk[1]) * nk[2];
        for (int k = 0; k < nk[0]; ++k) {
            for (std::size_t r = 0; r < n12; ++r) {
                cplx acc = 0.0;
                for (int q = 0; q < nn[0]; ++q) {
                    acc += F[0][static_cast<std::size_t>(k) * nn[0] + q] * H2[static_cast<std::size_t>(q) * n12 + r];
                }
                acc *= kInvVolume * kInvVolume;
                const std::size_t m = static_cast<std::size_t>(k) * n12 + r;
                if (m < n_mom) {
                    g.at(p, m) = acc.real();
                }
                max_imag = std::max(max_imag, std::abs(acc.imag()));
            }
        }
    }
    g.diagnostics.max_imag_residue = max_imag;
    g.diagnostics.alpha_order = orders[0];
    g.diagnostics.beta_order = orders[1];
    g.diagnostics.gamma_order = orders[2];
    return g;
}

}  // namespace

PhaseSpaceGrid wigner_from_angle_basis(const RotorState& state, const GridSpec& spec, AngleQuadrature quad) {
    if (quad.order < AngleQuadrature::kMinimumOrder) {
        throw ConfigError("quadrature order " + std::to_string(quad.order) + " below the minimum " +
                          std::to_string(AngleQuadrature::kMinimumOrder));
    }
    PhaseSpaceGrid g = is_m_basis(state.basis()) ? angle_path_m(state, spec) : angle_path_jkm(state, spec, quad);
    g.diagnostics.method = "angle";
    g.diagnostics.source = "state " + describe_basis(state.basis());
    if (g.diagnostics.max_imag_residue > 1e-10) {
        g.diagnostics.warnings.push_back("imaginary residue " + std::to_string(g.diagnostics.max_imag_residue) +
                                         " above 1e-10 discarded");
    }
    return g;
}

}  // namespace orient
