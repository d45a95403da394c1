#include "orient/dynamics.hpp"

#include <cmath>

#include "orient/error.hpp"
#include "orient/ode.hpp"
#include "orient/quadrature.hpp"
#include "orient/wigner_d.hpp"

namespace orient {

namespace {

double log_fact(int n) { return std::lgamma(n + 1.0); }

const JKMBasisSpec& block_basis(const RotorState& state) {
    if (is_m_basis(state.basis())) {
        throw DomainError("dynamics needs a symmetric-top basis");
    }
    const JKMBasisSpec& b = state.jkm_basis();
    if (!b.fixed_km()) {
        throw DomainError("dynamics needs a fixed (K, M) block");
    }
    return b;
}

}  // namespace

void TopConstants::check() const {
    if (!(A > 0.0) || !(C > 0.0)) {
        throw DomainError("rotational constants must be positive");
    }
}

void PulseConfig::check() const {
    if (!(duration > 0.0) || !std::isfinite(strength) || !std::isfinite(center_time)) {
        throw DomainError("pulse duration must be positive and parameters finite");
    }
}

double PulseConfig::envelope(double t) const {
    const double x = (t - center_time) / duration;
    return std::exp(-4.0 * std::log(2.0) * x * x);
}

double PulseConfig::area() const { return strength * duration * std::sqrt(kPi / (4.0 * std::log(2.0))); }

std::vector<double> free_energies(const JKMBasisSpec& basis, const TopConstants& k) {
    k.check();
    std::vector<double> e(basis.dimension());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const JKM& q = basis.entry(i);
        e[i] = k.A * q.J * (q.J + 1.0) + (k.C - k.A) * q.K * q.K;
    }
    return e;
}

double clebsch_gordan(int j1, int m1, int j2, int m2, int J, int M) {
    if (M != m1 + m2 || J < std::abs(j1 - j2) || J > j1 + j2 || std::abs(m1) > j1 || std::abs(m2) > j2 ||
        std::abs(M) > J) {
        return 0.0;
    }
    const double pre = 0.5 * (std::log(2.0 * J + 1.0) + log_fact(J + j1 - j2) + log_fact(J - j1 + j2) +
                              log_fact(j1 + j2 - J) - log_fact(j1 + j2 + J + 1) + log_fact(J + M) +
                              log_fact(J - M) + log_fact(j1 - m1) + log_fact(j1 + m1) + log_fact(j2 - m2) +
                              log_fact(j2 + m2));
    const int kmin = std::max({0, j2 - J - m1, j1 - J + m2});
    const int kmax = std::min({j1 + j2 - J, j1 - m1, j2 + m2});
    double sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        const double t = std::exp(pre - log_fact(k) - log_fact(j1 + j2 - J - k) - log_fact(j1 - m1 - k) -
                                  log_fact(j2 + m2 - k) - log_fact(J - j2 + m1 + k) - log_fact(J - j1 - m2 + k));
        sum += (k % 2 == 0) ? t : -t;
    }
    return sum;
}

double cos2beta_element(int Jp, int J, int K, int M) {
    if (std::abs(Jp - J) > 2) {
        return 0.0;
    }
    const double p2 = std::sqrt((2.0 * J + 1.0) / (2.0 * Jp + 1.0)) * clebsch_gordan(J, M, 2, 0, Jp, M) *
                      clebsch_gordan(J, K, 2, 0, Jp, K);
    return (Jp == J ? 1.0 / 3.0 : 0.0) + 2.0 / 3.0 * p2;
}

OperatorMatrix cos2beta_matrix(const JKMBasisSpec& basis, int quadrature_order) {
    if (!basis.fixed_km()) {
        throw DomainError("cos^2 beta matrix needs a fixed (K, M) block");
    }
    const auto [K, M] = *basis.fixed_km();
    const int order = quadrature_order > 0 ? quadrature_order : basis.j_max() + 8;
    const QuadratureRule rule = gauss_legendre(order, -1.0, 1.0);
    const auto n = static_cast<Eigen::Index>(basis.dimension());
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double x = rule.nodes[q];
        const auto col = wigner_small_d_column(basis.j_max(), M, K, std::acos(x));
        const double w = rule.weights[q] * x * x;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int Ji = basis.entry(static_cast<std::size_t>(i)).J;
            for (Eigen::Index j = 0; j < n; ++j) {
                const int Jj = basis.entry(static_cast<std::size_t>(j)).J;
                if (std::abs(Ji - Jj) > 2) continue;
                acc(i, j) += w * col[Ji] * col[Jj];
            }
        }
    }
    CMatrix m = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int Ji = basis.entry(static_cast<std::size_t>(i)).J;
        for (Eigen::Index j = 0; j < n; ++j) {
            const int Jj = basis.entry(static_cast<std::size_t>(j)).J;
            if (std::abs(Ji - Jj) > 2) continue;
            m(i, j) = 0.5 * std::sqrt((2.0 * Ji + 1.0) * (2.0 * Jj + 1.0)) * acc(i, j);
        }
    }
    m = 0.5 * (m + m.adjoint()).eval();
    return OperatorMatrix(basis, std::move(m), true);
}

RotorState free_propagate(const RotorState& state, double t_bar, const TopConstants& constants) {
    if (is_m_basis(state.basis())) {
        throw DomainError("free evolution needs a symmetric-top basis");
    }
    const std::vector<double> e = free_energies(state.jkm_basis(), constants);
    CVector ph(static_cast<Eigen::Index>(e.size()));
    for (std::size_t i = 0; i < e.size(); ++i) {
        ph[static_cast<Eigen::Index>(i)] = std::polar(1.0, -e[i] * t_bar);
    }
    if (state.is_pure()) {
        return RotorState::pure(state.basis(), ph.cwiseProduct(state.coefficients()));
    }
    CMatrix rho = ph.asDiagonal() * state.density() * ph.conjugate().asDiagonal();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return RotorState::mixed(state.basis(), std::move(rho));
}

RotorState propagate_kick(const RotorState& initial, const PulseConfig& pulse, const TopConstants& constants,
                          double tol, KickReport* report, double t_stop) {
    pulse.check();
    constants.check();
    const JKMBasisSpec& basis = block_basis(initial);
    if (!initial.is_pure()) {
        throw DomainError("kick propagation needs a pure state");
    }
    if (!(tol > 0.0)) {
        throw DomainError("tolerance must be positive");
    }
    const double t0 = pulse.start();
    const double t1 = std::isnan(t_stop) ? pulse.end() : t_stop;
    if (t1 < t0) {
        throw DomainError("stop time precedes the pulse window");
    }
    const std::vector<double> e = free_energies(basis, constants);
    const Eigen::MatrixXd C = cos2beta_matrix(basis).matrix().real();
    const Eigen::VectorXd E = Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
    const double s = pulse.strength;

    // Interaction picture: y = exp(i E (t - t0)) psi.
    std::function<CVector(double, const CVector&)> rhs = [&](double t, const CVector& y) -> CVector {
        const double g = s * pulse.envelope(t);
        if (g == 0.0) {
            return CVector::Zero(y.size());
        }
        CVector ph(E.size());
        for (Eigen::Index i = 0; i < E.size(); ++i) {
            ph[i] = std::polar(1.0, E[i] * (t - t0));
        }
        const CVector x = ph.conjugate().cwiseProduct(y);
        const CVector cx = C * x;
        return cplx(0.0, -g) * ph.cwiseProduct(cx);
    };
    OdeOptions opt;
    opt.rtol = tol;
    opt.atol = tol;
    OdeStats stats;
    CVector y = initial.coefficients();
    if (s != 0.0 && t1 > t0) {
        y = integrate_dp5<CVector>(rhs, t0, t1, y, opt, &stats);
    }
    const double drift = std::abs(y.norm() - 1.0);
    KickReport local;
    KickReport& rep = report ? *report : local;
    rep = KickReport{};
    rep.norm_drift = drift;
    rep.steps = stats.accepted;
    rep.rejected = stats.rejected;
    if (drift > 100.0 * tol) {
        throw IntegrationError("norm drift " + std::to_string(drift) + " exceeds 100 x tolerance after " +
                               std::to_string(stats.accepted) + " steps");
    }
    CVector psi(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        psi[i] = std::polar(1.0, -E[i] * (t1 - t0)) * y[i];
    }
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        if (basis.entry(i).J >= basis.j_max() - 1) {
            rep.top_shell_population += std::norm(psi[static_cast<Eigen::Index>(i)]);
        }
    }
    if (rep.top_shell_population > 1e-6) {
        rep.warnings.push_back("population " + std::to_string(rep.top_shell_population) +
                               " in the two highest J shells; raise j_max");
    }
    if (drift <= 1e-12) {
        return RotorState::pure(basis, std::move(psi));
    }
    rep.renormalized = true;
    return RotorState::normalized(basis, std::move(psi));
}

double cos2beta_expectation(const RotorState& state, const OperatorMatrix& cos2) {
    return expectation(state, cos2).real();
}

AlignmentResult run_alignment(const AlignmentConfig& cfg) {
    cfg.constants.check();
    cfg.pulse.check();
    check_jkm(cfg.initial);
    if (cfg.j_max < cfg.initial.J) {
        throw DomainError("j_max below the initial J");
    }
    for (std::size_t i = 1; i < cfg.times.size(); ++i) {
        if (!(cfg.times[i] >= cfg.times[i - 1])) {
            throw DomainError("sample times must be sorted ascending");
        }
    }
    const JKMBasisSpec basis(cfg.j_max, std::pair{cfg.initial.K, cfg.initial.M});
    CVector c = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    c[static_cast<Eigen::Index>(basis.index(cfg.initial))] = 1.0;
    const RotorState init = RotorState::pure(basis, c);
    const OperatorMatrix cos2 = cos2beta_matrix(basis);

    AlignmentResult out;
    out.pre_kick_signal = cos2beta_expectation(init, cos2);
    out.post_kick = propagate_kick(init, cfg.pulse, cfg.constants, cfg.tol, &out.kick);
    out.post_kick_signal = cos2beta_expectation(*out.post_kick, cos2);
    const double ts = cfg.pulse.start();
    const double te = cfg.pulse.end();
    for (double t : cfg.times) {
        RotorState s = t <= ts   ? free_propagate(init, t - ts, cfg.constants)
                       : t < te ? propagate_kick(init, cfg.pulse, cfg.constants, cfg.tol, nullptr, t)
                                : free_propagate(*out.post_kick, t - te, cfg.constants);
        out.times.push_back(t);
        out.signal.push_back(cos2beta_expectation(s, cos2));
        out.snapshots.push_back(std::move(s));
    }
    return out;
}

std::vector<std::pair<double, double>> alignment_signal(const AlignmentConfig& config) {
    const AlignmentResult r = run_alignment(config);
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        out.emplace_back(r.times[i], r.signal[i]);
    }
    return out;
}

}  // namespace orient
