#include "orient/grid_kernels.hpp"

#include <algorithm>
#include <cmath>


namespace orient::kernels {

namespace {

struct Entry {
    std::size_t s;  // flat index into the (s_alpha, s_beta, s_gamma) table
    std::array<int, 3> d;
    cplx value;
};

struct SincColumn {
    std::vector<int> k;
    std::vector<double> v;
};

}  // namespace

double evaluate_factorized(const MBasisSpec& basis, const CMatrix& A, double prefactor, const GridSpec& spec,
                           std::vector<double>& out) {
    const AngleGrid& ag = spec.angles;
    const MomentumWindow& mw = spec.momenta;
    std::array<int, 3> L{}, ns{}, nk{}, nth{};
    for (Axis ax : kAxes) {
        const int i = axis_index(ax);
        L[i] = basis.m_max(ax);
        ns[i] = 4 * L[i] + 1;
        nk[i] = mw.count(ax);
        nth[i] = ag.count(ax);
    }
    const std::size_t n_s = static_cast<std::size_t>(ns[0]) * ns[1] * ns[2];

    std::vector<Entry> entries;
    const std::size_t dim = basis.dimension();
    for (std::size_t a = 0; a < dim; ++a) {
        const MomentumTriple ma = basis.triple(a);
        for (std::size_t b = 0; b < dim; ++b) {
            const cplx v = A(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            if (v == 0.0) {
                continue;
            }
            const MomentumTriple mb = basis.triple(b);
            Entry e;
            std::array<int, 3> s{};
            for (Axis ax : kAxes) {
                const int i = axis_index(ax);
                s[i] = ma[ax] + mb[ax] + 2 * L[i];
                e.d[i] = ma[ax] - mb[ax] + 2 * L[i];
            }
            e.s = (static_cast<std::size_t>(s[0]) * ns[1] + s[1]) * ns[2] + s[2];
            e.value = v;
            entries.push_back(e);
        }
    }

    // Phase tables per axis: phase[i][j * ns + d] = exp(i phi (d - 2L) theta_j).
    std::array<std::vector<cplx>, 3> phase;
    // Sparse sinc columns per axis and s: nonzero (k, value) pairs.
    std::array<std::vector<SincColumn>, 3> sinc;
    for (Axis ax : kAxes) {
        const int i = axis_index(ax);
        const double phi = axis_phase_factor(ax);
        phase[i].resize(static_cast<std::size_t>(nth[i]) * ns[i]);
        for (int j = 0; j < nth[i]; ++j) {
            const double th = ag.point(ax, j);
            for (int d = 0; d < ns[i]; ++d) {
                phase[i][static_cast<std::size_t>(j) * ns[i] + d] = std::polar(1.0, phi * (d - 2 * L[i]) * th);
            }
        }
        sinc[i].resize(ns[i]);
        for (int si = 0; si < ns[i]; ++si) {
            const int s = si - 2 * L[i];
            for (int ki = 0; ki < nk[i]; ++ki) {
                const double v = half_sinc(mw.lo[i] + ki, s);
                if (v != 0.0) {
                    sinc[i][si].k.push_back(ki);
                    sinc[i][si].v.push_back(v);
                }
            }
        }
    }

    const std::size_t n_ang = ag.size();
    const std::size_t n_mom = mw.size();
    out.assign(n_ang * n_mom, 0.0);
    double max_imag = 0.0;

#pragma omp parallel reduction(max : max_imag)
    {
        std::vector<cplx> F(n_s);
        std::vector<cplx> G1(static_cast<std::size_t>(nk[0]) * ns[1] * ns[2]);
        std::vector<cplx> G2(static_cast<std::size_t>(nk[0]) * nk[1] * ns[2]);
        std::vector<cplx> G3(n_mom);
#pragma omp for schedule(dynamic)
        for (std::size_t p = 0; p < n_ang; ++p) {
            const auto j = ag.split(p);
            const cplx* pa = &phase[0][static_cast<std::size_t>(j[0]) * ns[0]];
            const cplx* pb = &phase[1][static_cast<std::size_t>(j[1]) * ns[1]];
            const cplx* pg = &phase[2][static_cast<std::size_t>(j[2]) * ns[2]];
            std::fill(F.begin(), F.end(), cplx(0.0));
            for (const Entry& e : entries) {
                F[e.s] += e.value * (pa[e.d[0]] * pb[e.d[1]] * pg[e.d[2]]);
            }
            // Contract s_alpha -> k_alpha.
            const std::size_t blk1 = static_cast<std::size_t>(ns[1]) * ns[2];
            std::fill(G1.begin(), G1.end(), cplx(0.0));
            for (int sa = 0; sa < ns[0]; ++sa) {
                const cplx* src = &F[static_cast<std::size_t>(sa) * blk1];
                const SincColumn& col = sinc[0][sa];
                for (std::size_t t = 0; t < col.k.size(); ++t) {
                    cplx* dst = &G1[static_cast<std::size_t>(col.k[t]) * blk1];
                    const double v = col.v[t];
                    for (std::size_t q = 0; q < blk1; ++q) {
                        dst[q] += v * src[q];
                    }
                }
            }
            // s_beta -> k_beta.
            std::fill(G2.begin(), G2.end(), cplx(0.0));
            for (int ka = 0; ka < nk[0]; ++ka) {
                for (int sb = 0; sb < ns[1]; ++sb) {
                    const cplx* src = &G1[(static_cast<std::size_t>(ka) * ns[1] + sb) * ns[2]];
                    const SincColumn& col = sinc[1][sb];
                    for (std::size_t t = 0; t < col.k.size(); ++t) {
                        cplx* dst = &G2[(static_cast<std::size_t>(ka) * nk[1] + col.k[t]) * ns[2]];
                        const double v = col.v[t];
                        for (int q = 0; q < ns[2]; ++q) {
                            dst[q] += v * src[q];
                        }
                    }
                }
            }
            // s_gamma -> k_gamma.
            std::fill(G3.begin(), G3.end(), cplx(0.0));
            for (std::size_t kab = 0; kab < static_cast<std::size_t>(nk[0]) * nk[1]; ++kab) {
                const cplx* src = &G2[kab * ns[2]];
                cplx* dst = &G3[kab * nk[2]];
                for (int sg = 0; sg < ns[2]; ++sg) {
                    const SincColumn& col = sinc[2][sg];
                    for (std::size_t t = 0; t < col.k.size(); ++t) {
                        dst[col.k[t]] += col.v[t] * src[sg];
                    }
                }
            }
            for (std::size_t m = 0; m < n_mom; ++m) {
                out[m * n_ang + p] = prefactor * G3[m].real();
                max_imag = std::max(max_imag, std::abs(prefactor * G3[m].imag()));
            }
        }
    }
    return max_imag;
}

double evaluate_reference(const MBasisSpec& basis, const CMatrix& A, double prefactor, const GridSpec& spec,
                          std::vector<double>& out) {
    const AngleGrid& ag = spec.angles;
    const MomentumWindow& mw = spec.momenta;
    const std::size_t n_ang = ag.size();
    const std::size_t n_mom = mw.size();
    const std::size_t dim = basis.dimension();
    out.assign(n_ang * n_mom, 0.0);
    double max_imag = 0.0;
    auto naive_sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; };
    for (std::size_t m = 0; m < n_mom; ++m) {
        const MomentumTriple k = mw.at(m);
        for (std::size_t p = 0; p < n_ang; ++p) {
            const EulerAngles th = ag.at(p);
            cplx acc = 0.0;
            for (std::size_t a = 0; a < dim; ++a) {
                const MomentumTriple ma = basis.triple(a);
                for (std::size_t b = 0; b < dim; ++b) {
                    const cplx v = A(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                    if (v == 0.0) {
                        continue;
                    }
                    const MomentumTriple mb = basis.triple(b);
                    double phase = 0.0;
                    double sn = 1.0;
                    for (Axis ax : kAxes) {
                        phase += axis_phase_factor(ax) * (ma[ax] - mb[ax]) * th[ax];
                        sn *= naive_sinc((k[ax] - 0.5 * (ma[ax] + mb[ax])) * kPi);
                    }
                    acc += v * sn * std::polar(1.0, phase);
                }
            }
            out[m * n_ang + p] = prefactor * acc.real();
            max_imag = std::max(max_imag, std::abs(prefactor * acc.imag()));
        }
    }
    return max_imag;
}

}  // namespace orient::kernels
