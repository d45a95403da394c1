#include "orient/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "orient/error.hpp"
#include "orient/grid_kernels.hpp"
#include "orient/series.hpp"

namespace orient {

namespace {

constexpr double kInvVolume = 1.0 / (4.0 * kPi * kPi * kPi);

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

}  // namespace

int AngleGrid::count(Axis a) const {
    switch (a) {
        case Axis::alpha: return n_alpha;
        case Axis::beta: return n_beta;
        case Axis::gamma: return n_gamma;
    }
    return 1;
}

std::array<int, 3> AngleGrid::split(std::size_t i) const {
    const int ig = static_cast<int>(i % n_gamma);
    const int ib = static_cast<int>((i / n_gamma) % n_beta);
    const int ia = static_cast<int>(i / (static_cast<std::size_t>(n_gamma) * n_beta));
    return {ia, ib, ig};
}

EulerAngles AngleGrid::at(std::size_t i) const {
    const auto j = split(i);
    return {point(Axis::alpha, j[0]), point(Axis::beta, j[1]), point(Axis::gamma, j[2])};
}

MomentumWindow MomentumWindow::symmetric(int a, int b, int g) {
    MomentumWindow w;
    w.lo = {-a, -b, -g};
    w.hi = {a, b, g};
    return w;
}

std::size_t MomentumWindow::size() const {
    return static_cast<std::size_t>(count(Axis::alpha)) * count(Axis::beta) * count(Axis::gamma);
}

MomentumTriple MomentumWindow::at(std::size_t i) const {
    const std::size_t ng = count(Axis::gamma);
    const std::size_t nb = count(Axis::beta);
    return {lo[0] + static_cast<int>(i / (ng * nb)), lo[1] + static_cast<int>((i / ng) % nb),
            lo[2] + static_cast<int>(i % ng)};
}

std::optional<std::size_t> MomentumWindow::find(const MomentumTriple& m) const {
    for (Axis a : kAxes) {
        const int i = axis_index(a);
        if (m[a] < lo[i] || m[a] > hi[i]) {
            return std::nullopt;
        }
    }
    return (static_cast<std::size_t>(m.m_alpha - lo[0]) * count(Axis::beta) + (m.m_beta - lo[1])) *
               count(Axis::gamma) +
           (m.m_gamma - lo[2]);
}

PhaseSpaceGrid::PhaseSpaceGrid(GridSpec spec) : spec_(spec) {
    for (Axis a : kAxes) {
        if (spec_.angles.count(a) < 1) {
            throw ConfigError("angle grid counts must be positive");
        }
        if (spec_.momenta.count(a) < 1) {
            throw ConfigError("momentum window ranges must be non-empty");
        }
    }
    values_.assign(spec_.angles.size() * spec_.momenta.size(), 0.0);
}

double PhaseSpaceGrid::at_momentum(std::size_t angle, double ma, double mb, double mg) const {
    const auto idx = spec_.momenta.find(MomentumTriple::rounded(ma, mb, mg));
    if (!idx) {
        throw DomainError("momentum outside the grid window");
    }
    return at(angle, *idx);
}

double half_sinc(int k, int s) {
    const int twice = 2 * k - s;
    if (twice % 2 == 0) {
        return twice == 0 ? 1.0 : 0.0;
    }
    // k - s/2 = n + 1/2 with n = (twice - 1)/2
    const int n = (twice - 1) / 2;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign / (kPi * (n + 0.5));
}

OperatorMatrix displacement_matrix(const DisplacementSpec& spec, const MBasisSpec& basis) {
    const std::size_t n = basis.dimension();
    CMatrix D = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) {
        const MomentumTriple m0 = basis.triple(c);
        const auto r = basis.find(m0 + spec.m);
        if (!r) {
            continue;
        }
        double phase = 0.0;
        for (Axis a : kAxes) {
            phase -= spec.omega[a] * axis_phase_factor(a) * m0[a];
        }
        D(static_cast<Eigen::Index>(*r), static_cast<Eigen::Index>(c)) = std::polar(1.0, phase);
    }
    return OperatorMatrix(basis, std::move(D), false);
}

std::size_t displacement_leakage(const DisplacementSpec& spec, const MBasisSpec& basis) {
    std::size_t lost = 0;
    for (std::size_t c = 0; c < basis.dimension(); ++c) {
        if (!basis.contains(basis.triple(c) + spec.m)) {
            ++lost;
        }
    }
    return lost;
}

OperatorMatrix kernel_origin(Axis axis, const MBasisSpec& basis) {
    std::array<int, 3> mm{0, 0, 0};
    mm[axis_index(axis)] = basis.m_max(axis);
    const MBasisSpec sub(mm[0], mm[1], mm[2]);
    const int l = basis.m_max(axis);
    CMatrix K(2 * l + 1, 2 * l + 1);
    for (int r = -l; r <= l; ++r) {
        for (int c = -l; c <= l; ++c) {
            K(r + l, c + l) = half_sinc(0, -(r + c));
        }
    }
    return OperatorMatrix(sub, std::move(K), true);
}

OperatorMatrix kernel_origin(const MBasisSpec& basis) {
    return kernel({0.0, 0.0, 0.0}, {0, 0, 0}, basis);
}

OperatorMatrix kernel(const EulerAngles& omega, const MomentumTriple& m, const MBasisSpec& basis) {
    const std::size_t n = basis.dimension();
    CMatrix K(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const MomentumTriple c = basis.triple(r);
        for (std::size_t q = 0; q < n; ++q) {
            const MomentumTriple d = basis.triple(q);
            double phase = 0.0;
            double amp = 1.0;
            for (Axis a : kAxes) {
                phase -= axis_phase_factor(a) * (c[a] - d[a]) * omega[a];
                amp *= half_sinc(m[a], c[a] + d[a]);
                if (amp == 0.0) {
                    break;
                }
            }
            K(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) = amp == 0.0 ? cplx(0.0) : std::polar(amp, phase);
        }
    }
    return OperatorMatrix(basis, std::move(K), true);
}

OperatorMatrix kernel_by_conjugation(const EulerAngles& omega, const MomentumTriple& m, const MBasisSpec& basis) {
    const OperatorMatrix D = displacement_matrix({omega, m}, basis);
    const OperatorMatrix K0 = kernel_origin(basis);
    CMatrix K = D.matrix() * K0.matrix() * D.matrix().adjoint();
    return OperatorMatrix(basis, std::move(K), true);
}

cplx weyl_symbol(const OperatorMatrix& op, const EulerAngles& omega, const MomentumTriple& m) {
    const auto* basis = std::get_if<MBasisSpec>(&op.basis());
    if (!basis) {
        throw DomainError("Weyl symbols need a momentum-basis operator");
    }
    const std::size_t n = basis->dimension();
    cplx acc = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        const MomentumTriple ma = basis->triple(a);
        for (std::size_t b = 0; b < n; ++b) {
            const cplx v = op.matrix()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            if (v == 0.0) {
                continue;
            }
            const MomentumTriple mb = basis->triple(b);
            double amp = 1.0;
            double phase = 0.0;
            for (Axis ax : kAxes) {
                amp *= half_sinc(m[ax], ma[ax] + mb[ax]);
                phase += axis_phase_factor(ax) * (ma[ax] - mb[ax]) * omega[ax];
            }
            if (amp != 0.0) {
                acc += v * std::polar(amp, phase);
            }
        }
    }
    return acc;
}

namespace {

PhaseSpaceGrid evaluate(const MBasisSpec& basis, const CMatrix& A, double prefactor, const GridSpec& spec,
                        KernelBackend backend) {
    PhaseSpaceGrid g(spec);
    const double imag = backend == KernelBackend::parallel
                            ? kernels::evaluate_factorized(basis, A, prefactor, spec, g.values())
                            : kernels::evaluate_reference(basis, A, prefactor, spec, g.values());
    g.diagnostics.max_imag_residue = imag;
    g.diagnostics.method = "momentum";
    return g;
}

}  // namespace

PhaseSpaceGrid weyl_symbol_grid(const OperatorMatrix& op, const GridSpec& spec, KernelBackend backend) {
    const auto* basis = std::get_if<MBasisSpec>(&op.basis());
    if (!basis) {
        throw DomainError("Weyl symbols need a momentum-basis operator");
    }
    PhaseSpaceGrid g = evaluate(*basis, op.matrix(), 1.0, spec, backend);
    g.diagnostics.source = "operator " + describe_basis(op.basis());
    if (op.hermitian() && g.diagnostics.max_imag_residue > 1e-10) {
        g.diagnostics.warnings.push_back("imaginary residue above 1e-10 for a Hermitian operator");
    }
    return g;
}

PhaseSpaceGrid symbol_grid_from_function(const GridSpec& spec,
                                         const std::function<double(const EulerAngles&, const MomentumTriple&)>& f) {
    PhaseSpaceGrid g(spec);
    for (std::size_t m = 0; m < g.n_momenta(); ++m) {
        const MomentumTriple k = spec.momenta.at(m);
        for (std::size_t p = 0; p < g.n_angles(); ++p) {
            g.at(p, m) = f(spec.angles.at(p), k);
        }
    }
    g.diagnostics.source = "analytic";
    g.diagnostics.method = "function";
    return g;
}

PhaseSpaceGrid wigner_from_m_basis(const RotorState& state, const GridSpec& spec, KernelBackend backend) {
    const MBasisSpec& basis = state.m_basis();
    PhaseSpaceGrid g = evaluate(basis, state.density(), kInvVolume, spec, backend);
    g.diagnostics.source = "state " + describe_basis(state.basis());
    if (g.diagnostics.max_imag_residue > 1e-10) {
        g.diagnostics.warnings.push_back("imaginary residue " + std::to_string(g.diagnostics.max_imag_residue) +
                                         " above 1e-10 discarded");
    }
    return g;
}

double angle_cell(const AngleGrid& g) {
    return (2.0 * kPi / g.n_alpha) * (kPi / g.n_beta) * (2.0 * kPi / g.n_gamma);
}

namespace {

void require_full_resolution(const PhaseSpaceGrid& grid, const MBasisSpec& basis) {
    for (Axis a : kAxes) {
        const int need = 4 * basis.m_max(a) + 1;
        if (grid.spec().angles.count(a) < need) {
            throw ConfigError(std::string("inverse Weyl map needs at least ") + std::to_string(need) + " samples on " +
                              axis_name(a) + ", grid has " + std::to_string(grid.spec().angles.count(a)));
        }
        const int i = axis_index(a);
        if (grid.spec().momenta.lo[i] > -basis.m_max(a) || grid.spec().momenta.hi[i] < basis.m_max(a)) {
            throw ConfigError(std::string("inverse Weyl map needs the momentum window to cover the basis on ") +
                              axis_name(a));
        }
    }
}

}  // namespace

OperatorMatrix inverse_weyl(const PhaseSpaceGrid& grid, const MBasisSpec& basis) {
    require_full_resolution(grid, basis);
    const GridSpec& spec = grid.spec();
    std::array<int, 3> L{}, nd{}, nk{}, nth{};
    for (Axis ax : kAxes) {
        const int i = axis_index(ax);
        L[i] = basis.m_max(ax);
        nd[i] = 4 * L[i] + 1;
        nk[i] = spec.momenta.count(ax);
        nth[i] = spec.angles.count(ax);
    }
    const std::size_t n_mom = spec.momenta.size();
    const std::size_t n_ang = spec.angles.size();

    // Angle DFT: What[k][d] = (1/n) sum_j W(theta_j, k) exp(-i phi d theta_j), axis by axis.
    // Layout: index = k * (nd0 nd1 nd2) + d.
    std::vector<cplx> cur(grid.values().begin(), grid.values().end());
    std::array<int, 3> shape = {nth[0], nth[1], nth[2]};
    for (Axis ax : kAxes) {
        const int i = axis_index(ax);
        const double phi = axis_phase_factor(ax);
        std::array<int, 3> nshape = shape;
        nshape[i] = nd[i];
        const std::size_t inner_after = [&] {
            std::size_t r = 1;
            for (int q = i + 1; q < 3; ++q) r *= shape[q];
            return r;
        }();
        const std::size_t outer_before = [&] {
            std::size_t r = 1;
            for (int q = 0; q < i; ++q) r *= shape[q];
            return r;
        }();
        const std::size_t old_block = static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
        const std::size_t new_block = static_cast<std::size_t>(nshape[0]) * nshape[1] * nshape[2];
        std::vector<cplx> table(static_cast<std::size_t>(nd[i]) * nth[i]);
        for (int d = 0; d < nd[i]; ++d) {
            for (int j = 0; j < nth[i]; ++j) {
                table[static_cast<std::size_t>(d) * nth[i] + j] =
                    std::polar(1.0 / nth[i], -phi * (d - 2 * L[i]) * spec.angles.point(ax, j));
            }
        }
        std::vector<cplx> next(n_mom * new_block, cplx(0.0));
        for (std::size_t m = 0; m < n_mom; ++m) {
            for (std::size_t o = 0; o < outer_before; ++o) {
                for (int d = 0; d < nd[i]; ++d) {
                    for (int j = 0; j < nth[i]; ++j) {
                        const cplx t = table[static_cast<std::size_t>(d) * nth[i] + j];
                        const cplx* src = &cur[m * old_block + (o * shape[i] + j) * inner_after];
                        cplx* dst = &next[m * new_block + (o * nd[i] + d) * inner_after];
                        for (std::size_t q = 0; q < inner_after; ++q) {
                            dst[q] += t * src[q];
                        }
                    }
                }
            }
        }
        cur.swap(next);
        shape = nshape;
    }
    (void)n_ang;

    // Per-axis least-squares solve of What[k][d] = sum_s A(s, d) sinc((k - s/2) pi).
    // For each axis and d, the admissible s share the parity of d with |s| <= 2L - |d|.
    auto pinv_for = [&](int i, int d) {
        const int dd = d - 2 * L[i];
        const int smax = 2 * L[i] - std::abs(dd);
        std::vector<int> svals;
        for (int s = -smax; s <= smax; s += 2) {
            svals.push_back(s);
        }
        Eigen::MatrixXd M(nk[i], static_cast<Eigen::Index>(svals.size()));
        for (int k = 0; k < nk[i]; ++k) {
            for (std::size_t c = 0; c < svals.size(); ++c) {
                M(k, static_cast<Eigen::Index>(c)) = half_sinc(spec.momenta.lo[i] + k, svals[c]);
            }
        }
        Eigen::MatrixXd P = M.completeOrthogonalDecomposition().pseudoInverse();
        return std::make_pair(svals, P);
    };
    std::array<std::vector<std::pair<std::vector<int>, Eigen::MatrixXd>>, 3> solvers;
    for (int i = 0; i < 3; ++i) {
        for (int d = 0; d < nd[i]; ++d) {
            solvers[i].push_back(pinv_for(i, d));
        }
    }

    const std::size_t n = basis.dimension();
    CMatrix A = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const std::size_t dblock = static_cast<std::size_t>(nd[0]) * nd[1] * nd[2];
    for (int da = 0; da < nd[0]; ++da) {
        for (int db = 0; db < nd[1]; ++db) {
            for (int dg = 0; dg < nd[2]; ++dg) {
                const auto& [sa, Pa] = solvers[0][da];
                const auto& [sb, Pb] = solvers[1][db];
                const auto& [sg, Pg] = solvers[2][dg];
                if (sa.empty() || sb.empty() || sg.empty()) {
                    continue;
                }
                const std::size_t doff = (static_cast<std::size_t>(da) * nd[1] + db) * nd[2] + dg;
                // Gather rhs[ka][kb][kg].
                std::vector<cplx> rhs(n_mom);
                for (std::size_t m = 0; m < n_mom; ++m) {
                    rhs[m] = cur[m * dblock + doff];
                }
                // Apply Pg, Pb, Pa along each momentum axis.
                std::vector<cplx> t1(static_cast<std::size_t>(nk[0]) * nk[1] * sg.size(), cplx(0.0));
                for (std::size_t ab = 0; ab < static_cast<std::size_t>(nk[0]) * nk[1]; ++ab) {
                    for (std::size_t c = 0; c < sg.size(); ++c) {
                        cplx acc = 0.0;
                        for (int k = 0; k < nk[2]; ++k) {
                            acc += Pg(static_cast<Eigen::Index>(c), k) * rhs[ab * nk[2] + k];
                        }
                        t1[ab * sg.size() + c] = acc;
                    }
                }
                std::vector<cplx> t2(static_cast<std::size_t>(nk[0]) * sb.size() * sg.size(), cplx(0.0));
                for (int ka = 0; ka < nk[0]; ++ka) {
                    for (std::size_t cb = 0; cb < sb.size(); ++cb) {
                        for (std::size_t cg = 0; cg < sg.size(); ++cg) {
                            cplx acc = 0.0;
                            for (int k = 0; k < nk[1]; ++k) {
                                acc += Pb(static_cast<Eigen::Index>(cb), k) *
                                       t1[(static_cast<std::size_t>(ka) * nk[1] + k) * sg.size() + cg];
                            }
                            t2[(static_cast<std::size_t>(ka) * sb.size() + cb) * sg.size() + cg] = acc;
                        }
                    }
                }
                for (std::size_t ca = 0; ca < sa.size(); ++ca) {
                    for (std::size_t cb = 0; cb < sb.size(); ++cb) {
                        for (std::size_t cg = 0; cg < sg.size(); ++cg) {
                            cplx acc = 0.0;
                            for (int k = 0; k < nk[0]; ++k) {
                                acc += Pa(static_cast<Eigen::Index>(ca), k) *
                                       t2[(static_cast<std::size_t>(k) * sb.size() + cb) * sg.size() + cg];
                            }
                            const std::array<int, 3> s{sa[ca], sb[cb], sg[cg]};
                            const std::array<int, 3> d{da - 2 * L[0], db - 2 * L[1], dg - 2 * L[2]};
                            MomentumTriple a, b;
                            for (int i = 0; i < 3; ++i) {
                                a[kAxes[i]] = (s[i] + d[i]) / 2;
                                b[kAxes[i]] = (s[i] - d[i]) / 2;
                            }
                            A(static_cast<Eigen::Index>(basis.index(a)), static_cast<Eigen::Index>(basis.index(b))) = acc;
                        }
                    }
                }
            }
        }
    }
    return OperatorMatrix(basis, std::move(A), false);
}

OperatorMatrix inverse_weyl_reference(const PhaseSpaceGrid& grid, const MBasisSpec& basis) {
    const GridSpec& spec = grid.spec();
    const std::size_t n = basis.dimension();
    CMatrix A = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double w = angle_cell(spec.angles) * kInvVolume;
    for (std::size_t m = 0; m < grid.n_momenta(); ++m) {
        const MomentumTriple k = spec.momenta.at(m);
        for (std::size_t p = 0; p < grid.n_angles(); ++p) {
            const double v = grid.at(p, m);
            if (v == 0.0) {
                continue;
            }
            A += (w * v) * kernel(spec.angles.at(p), k, basis).matrix();
        }
    }
    return OperatorMatrix(basis, std::move(A), false);
}

double momentum_sum(const MomentumWindow& window, const std::vector<double>& values, bool extrapolate,
                    double* uncertainty) {
    const int na = window.count(Axis::alpha);
    const int nb = window.count(Axis::beta);
    const int ng = window.count(Axis::gamma);
    double unc = 0.0;
    auto reduce = [&](const std::vector<double>& v) {
        if (!extrapolate) {
            double s = 0.0;
            for (double x : v) s += x;
            return s;
        }
        const SeriesEstimate e = window_sum(v);
        if (e.extrapolated) {
            unc = std::max(unc, e.uncertainty);
        }
        return e.value;
    };
    std::vector<double> over_b(na);
    std::vector<double> line;
    for (int ia = 0; ia < na; ++ia) {
        std::vector<double> over_g(nb);
        for (int ib = 0; ib < nb; ++ib) {
            line.assign(values.begin() + (static_cast<std::size_t>(ia) * nb + ib) * ng,
                        values.begin() + (static_cast<std::size_t>(ia) * nb + ib + 1) * ng);
            over_g[ib] = reduce(line);
        }
        over_b[ia] = reduce(over_g);
    }
    const double total = reduce(over_b);
    if (uncertainty) {
        *uncertainty = unc;
    }
    return total;
}

Marginals marginals(const PhaseSpaceGrid& grid, bool extrapolate) {
    Marginals out;
    const std::size_t na = grid.n_angles();
    const std::size_t nm = grid.n_momenta();
    out.angle.resize(na);
    out.angle_raw.resize(na);
    out.momentum.assign(nm, 0.0);
    std::vector<double> column(nm);
    for (std::size_t p = 0; p < na; ++p) {
        double raw = 0.0;
        for (std::size_t m = 0; m < nm; ++m) {
            column[m] = grid.at(p, m);
            raw += column[m];
        }
        out.angle_raw[p] = raw;
        double unc = 0.0;
        out.angle[p] = momentum_sum(grid.spec().momenta, column, extrapolate, &unc);
        if (out.angle[p] != raw) {
            ++out.extrapolated_points;
        }
        out.angle_uncertainty = std::max(out.angle_uncertainty, unc);
    }
    const double cell = angle_cell(grid.spec().angles);
    for (std::size_t m = 0; m < nm; ++m) {
        double s = 0.0;
        for (std::size_t p = 0; p < na; ++p) {
            s += grid.at(p, m);
        }
        out.momentum[m] = s * cell;
    }
    out.min_angle = *std::min_element(out.angle.begin(), out.angle.end());
    out.min_momentum = *std::min_element(out.momentum.begin(), out.momentum.end());
    return out;
}

double normalization(const PhaseSpaceGrid& grid) {
    double s = 0.0;
    for (double v : grid.values()) {
        s += v;
    }
    return s * angle_cell(grid.spec().angles);
}

double phase_space_expectation(const PhaseSpaceGrid& state_grid, const PhaseSpaceGrid& symbol_grid, bool extrapolate) {
    if (!(state_grid.spec() == symbol_grid.spec())) {
        throw DomainError("phase-space expectation needs identical grid specs");
    }
    const std::size_t na = state_grid.n_angles();
    const std::size_t nm = state_grid.n_momenta();
    std::vector<double> per_m(nm, 0.0);
    const double cell = angle_cell(state_grid.spec().angles);
    for (std::size_t m = 0; m < nm; ++m) {
        double s = 0.0;
        for (std::size_t p = 0; p < na; ++p) {
            s += state_grid.at(p, m) * symbol_grid.at(p, m);
        }
        per_m[m] = s * cell;
    }
    return momentum_sum(state_grid.spec().momenta, per_m, extrapolate);
}

OperatorMatrix weyl_ordered_product(int n, int m, Axis axis, const MBasisSpec& basis) {
    if (n < 0 || m < 0) {
        throw DomainError("Weyl-ordered product needs non-negative powers");
    }
    const OperatorMatrix an = angle_power_matrix(axis, n, basis);
    const OperatorMatrix p = momentum_matrix(axis, basis);
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    CMatrix out = CMatrix::Zero(dim, dim);
    CMatrix pk = CMatrix::Identity(dim, dim);
    std::vector<CMatrix> powers{pk};
    for (int k = 1; k <= m; ++k) {
        powers.push_back(powers.back() * p.matrix());
    }
    for (int k = 0; k <= m; ++k) {
        out += binomial(m, k) * powers[m - k] * an.matrix() * powers[k];
    }
    out /= std::pow(2.0, m);
    return OperatorMatrix(basis, std::move(out), true);
}

}  // namespace orient
