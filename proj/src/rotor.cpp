#include "orient/rotor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "orient/error.hpp"
#include "orient/quadrature.hpp"
#include "orient/wigner_d.hpp"

namespace orient {

const char* axis_name(Axis a) {
    switch (a) {
        case Axis::alpha: return "alpha";
        case Axis::beta: return "beta";
        case Axis::gamma: return "gamma";
    }
    return "?";
}

Axis parse_axis(const std::string& name) {
    if (name == "alpha") return Axis::alpha;
    if (name == "beta") return Axis::beta;
    if (name == "gamma") return Axis::gamma;
    throw DomainError("unknown axis '" + name + "'");
}

double wrap_angle(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0.0) {
        r += period;
    }
    if (r >= period) {
        r -= period;
    }
    return r;
}

EulerAngles::EulerAngles(double alpha, double beta, double gamma)
    : alpha_(wrap_angle(alpha, 2.0 * kPi)), beta_(wrap_angle(beta, kPi)), gamma_(wrap_angle(gamma, 2.0 * kPi)) {}

double EulerAngles::operator[](Axis a) const {
    switch (a) {
        case Axis::alpha: return alpha_;
        case Axis::beta: return beta_;
        case Axis::gamma: return gamma_;
    }
    return 0.0;
}

EulerAngles EulerAngles::translated(const EulerAngles& by) const {
    return {alpha_ + by.alpha_, beta_ + by.beta_, gamma_ + by.gamma_};
}

EulerAngles EulerAngles::translated_back(const EulerAngles& by) const {
    return {alpha_ - by.alpha_, beta_ - by.beta_, gamma_ - by.gamma_};
}

int MomentumTriple::operator[](Axis a) const {
    switch (a) {
        case Axis::alpha: return m_alpha;
        case Axis::beta: return m_beta;
        case Axis::gamma: return m_gamma;
    }
    return 0;
}

int& MomentumTriple::operator[](Axis a) {
    switch (a) {
        case Axis::alpha: return m_alpha;
        case Axis::beta: return m_beta;
        default: return m_gamma;
    }
}

MomentumTriple MomentumTriple::rounded(double a, double b, double g) {
    auto r = [](double x) { return static_cast<int>(std::floor(x + 0.5)); };
    return {r(a), r(b), r(g)};
}

MomentumTriple MomentumTriple::operator+(const MomentumTriple& o) const {
    return {m_alpha + o.m_alpha, m_beta + o.m_beta, m_gamma + o.m_gamma};
}

MomentumTriple MomentumTriple::operator-(const MomentumTriple& o) const {
    return {m_alpha - o.m_alpha, m_beta - o.m_beta, m_gamma - o.m_gamma};
}

MBasisSpec::MBasisSpec(int a, int b, int g) : m_max_{a, b, g} {
    if (a < 0 || b < 0 || g < 0) {
        throw DomainError("momentum window half-widths must be non-negative");
    }
}

std::size_t MBasisSpec::dimension() const {
    return static_cast<std::size_t>(width(Axis::alpha)) * width(Axis::beta) * width(Axis::gamma);
}

bool MBasisSpec::contains(const MomentumTriple& m) const {
    for (Axis a : kAxes) {
        if (std::abs(m[a]) > m_max(a)) {
            return false;
        }
    }
    return true;
}

std::optional<std::size_t> MBasisSpec::find(const MomentumTriple& m) const {
    if (!contains(m)) {
        return std::nullopt;
    }
    const std::size_t ia = m.m_alpha + m_max(Axis::alpha);
    const std::size_t ib = m.m_beta + m_max(Axis::beta);
    const std::size_t ig = m.m_gamma + m_max(Axis::gamma);
    return (ia * width(Axis::beta) + ib) * width(Axis::gamma) + ig;
}

std::size_t MBasisSpec::index(const MomentumTriple& m) const {
    auto i = find(m);
    if (!i) {
        throw DomainError("momentum triple outside the truncation window");
    }
    return *i;
}

MomentumTriple MBasisSpec::triple(std::size_t index) const {
    if (index >= dimension()) {
        throw DomainError("basis index out of range");
    }
    const std::size_t wg = width(Axis::gamma);
    const std::size_t wb = width(Axis::beta);
    const int ig = static_cast<int>(index % wg);
    const int ib = static_cast<int>((index / wg) % wb);
    const int ia = static_cast<int>(index / (wg * wb));
    return {ia - m_max(Axis::alpha), ib - m_max(Axis::beta), ig - m_max(Axis::gamma)};
}

void check_jkm(const JKM& q) {
    if (q.J < 0 || std::abs(q.K) > q.J || std::abs(q.M) > q.J) {
        throw DomainError("invalid quantum numbers J=" + std::to_string(q.J) + " K=" + std::to_string(q.K) +
                          " M=" + std::to_string(q.M));
    }
}

JKMBasisSpec::JKMBasisSpec(int j_max, std::optional<std::pair<int, int>> fixed_km)
    : j_max_(j_max), fixed_km_(fixed_km) {
    if (j_max < 0) {
        throw DomainError("j_max must be non-negative");
    }
    if (fixed_km_) {
        const auto [K, M] = *fixed_km_;
        const int j0 = std::max(std::abs(K), std::abs(M));
        if (j0 > j_max) {
            throw DomainError("fixed (K, M) block is empty for this j_max");
        }
        for (int J = j0; J <= j_max; ++J) {
            entries_.push_back({J, K, M});
        }
        return;
    }
    for (int J = 0; J <= j_max; ++J) {
        for (int K = -J; K <= J; ++K) {
            for (int M = -J; M <= J; ++M) {
                entries_.push_back({J, K, M});
            }
        }
    }
}

std::optional<std::size_t> JKMBasisSpec::find(const JKM& q) const {
    if (q.J < 0 || q.J > j_max_ || std::abs(q.K) > q.J || std::abs(q.M) > q.J) {
        return std::nullopt;
    }
    if (fixed_km_) {
        if (q.K != fixed_km_->first || q.M != fixed_km_->second) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(q.J - std::max(std::abs(q.K), std::abs(q.M)));
    }
    // sum_{j<J} (2j+1)^2 = J(2J-1)(2J+1)/3
    const long long j = q.J;
    const auto before = static_cast<std::size_t>(j * (2 * j - 1) * (2 * j + 1) / 3);
    return before + static_cast<std::size_t>(q.K + q.J) * (2 * q.J + 1) + (q.M + q.J);
}

std::size_t JKMBasisSpec::index(const JKM& q) const {
    auto i = find(q);
    if (!i) {
        throw DomainError("(J, K, M) outside the basis");
    }
    return *i;
}

std::size_t basis_dimension(const Basis& b) {
    return std::visit([](const auto& s) { return s.dimension(); }, b);
}

bool is_m_basis(const Basis& b) { return std::holds_alternative<MBasisSpec>(b); }

std::string describe_basis(const Basis& b) {
    std::ostringstream os;
    if (const auto* m = std::get_if<MBasisSpec>(&b)) {
        os << "m[" << m->m_max(Axis::alpha) << "," << m->m_max(Axis::beta) << "," << m->m_max(Axis::gamma) << "]";
    } else {
        const auto& j = std::get<JKMBasisSpec>(b);
        os << "jkm[" << j.j_max();
        if (j.fixed_km()) {
            os << ";K=" << j.fixed_km()->first << ",M=" << j.fixed_km()->second;
        }
        os << "]";
    }
    return os.str();
}

RotorState RotorState::pure(Basis basis, CVector c) {
    if (static_cast<std::size_t>(c.size()) != basis_dimension(basis)) {
        throw DomainError("coefficient vector does not match the basis dimension");
    }
    if (!c.allFinite()) {
        throw DomainError("non-finite coefficient");
    }
    const double n = c.norm();
    if (std::abs(n - 1.0) > 1e-12) {
        throw DomainError("pure state norm deviates from 1 by " + std::to_string(n - 1.0));
    }
    return RotorState(std::move(basis), std::move(c));
}

RotorState RotorState::normalized(Basis basis, CVector c) {
    const double n = c.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw DomainError("cannot normalize a zero or non-finite vector");
    }
    c /= n;
    return pure(std::move(basis), std::move(c));
}

RotorState RotorState::mixed(Basis basis, CMatrix rho) {
    const auto n = static_cast<Eigen::Index>(basis_dimension(basis));
    if (rho.rows() != n || rho.cols() != n) {
        throw DomainError("density matrix does not match the basis dimension");
    }
    if (!rho.allFinite()) {
        throw DomainError("non-finite density matrix entry");
    }
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) {
        throw DomainError("density matrix is not Hermitian (residual " + std::to_string(herm) + ")");
    }
    const cplx tr = rho.trace();
    if (std::abs(tr - 1.0) > 1e-12) {
        throw DomainError("density matrix trace deviates from 1");
    }
    const CMatrix h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw DomainError("density matrix has a negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
    }
    return RotorState(std::move(basis), std::move(rho));
}

const CVector& RotorState::coefficients() const {
    if (!is_pure()) {
        throw DomainError("state is mixed");
    }
    return std::get<CVector>(payload_);
}

CMatrix RotorState::density() const {
    if (is_pure()) {
        const CVector& c = std::get<CVector>(payload_);
        return c * c.adjoint();
    }
    return std::get<CMatrix>(payload_);
}

const MBasisSpec& RotorState::m_basis() const {
    if (!is_m_basis(basis_)) {
        throw DomainError("state is not in the momentum basis");
    }
    return std::get<MBasisSpec>(basis_);
}

const JKMBasisSpec& RotorState::jkm_basis() const {
    if (is_m_basis(basis_)) {
        throw DomainError("state is not in the symmetric-top basis");
    }
    return std::get<JKMBasisSpec>(basis_);
}

OperatorMatrix::OperatorMatrix(Basis basis, CMatrix matrix, bool hermitian)
    : basis_(std::move(basis)), matrix_(std::move(matrix)), hermitian_(hermitian) {
    const auto n = static_cast<Eigen::Index>(basis_dimension(basis_));
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw DomainError("operator matrix does not match the basis dimension");
    }
}

double OperatorMatrix::hermiticity_residual() const {
    if (matrix_.size() == 0) {
        return 0.0;
    }
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

void OperatorMatrix::check() const {
    if (hermitian_ && hermiticity_residual() >= 1e-10) {
        throw DomainError("operator flagged Hermitian is not");
    }
}

cplx wigner_D(int J, int M, int K, const EulerAngles& omega) {
    const double d = wigner_small_d(J, M, K, omega.beta());
    return std::polar(d, -(M * omega.alpha() + K * omega.gamma()));
}

cplx jkm_wavefunction(const JKM& q, const EulerAngles& omega) {
    check_jkm(q);
    const double norm = std::sqrt((2.0 * q.J + 1.0) / (8.0 * kPi * kPi));
    return norm * std::conj(wigner_D(q.J, q.M, q.K, omega));
}

namespace {

cplx m_phase(const MomentumTriple& m, const EulerAngles& omega) {
    return std::polar(1.0, m.m_alpha * omega.alpha() + 2.0 * m.m_beta * omega.beta() + m.m_gamma * omega.gamma());
}

}  // namespace

cplx m_wavefunction(const MomentumTriple& m, const EulerAngles& omega) {
    const double s = std::sin(omega.beta());
    if (!(s > 0.0)) {
        throw PoleError("momentum-basis wavefunction diverges at beta = 0");
    }
    return m_phase(m, omega) / std::sqrt(4.0 * kPi * kPi * kPi * s);
}

namespace {

// <Omega|basis_i> with the 1/sqrt(sin beta) factor of the m basis removed.
CVector basis_row(const Basis& basis, const EulerAngles& omega, bool strip_sin) {
    const std::size_t n = basis_dimension(basis);
    CVector row(static_cast<Eigen::Index>(n));
    if (const auto* mb = std::get_if<MBasisSpec>(&basis)) {
        const double scale = 1.0 / std::sqrt(4.0 * kPi * kPi * kPi);
        for (std::size_t i = 0; i < n; ++i) {
            row[static_cast<Eigen::Index>(i)] = scale * m_phase(mb->triple(i), omega);
        }
        if (!strip_sin) {
            const double s = std::sin(omega.beta());
            if (!(s > 0.0)) {
                throw PoleError("momentum-basis wavefunction diverges at beta = 0");
            }
            row /= std::sqrt(s);
        }
    } else {
        const auto& jb = std::get<JKMBasisSpec>(basis);
        for (std::size_t i = 0; i < n; ++i) {
            row[static_cast<Eigen::Index>(i)] = jkm_wavefunction(jb.entry(i), omega);
        }
        if (strip_sin) {
            row *= std::sqrt(std::sin(omega.beta()));
        }
    }
    return row;
}

}  // namespace

cplx angle_wavefunction(const RotorState& state, const EulerAngles& omega) {
    if (!state.is_pure()) {
        throw DomainError("angle_wavefunction needs a pure state");
    }
    const CVector row = basis_row(state.basis(), omega, false);
    return row.transpose() * state.coefficients();
}

double angle_density(const RotorState& state, const EulerAngles& omega) {
    const CVector row = basis_row(state.basis(), omega, true);
    if (state.is_pure()) {
        const cplx v = row.transpose() * state.coefficients();
        return std::norm(v);
    }
    const cplx v = row.transpose() * state.density() * row.conjugate();
    return v.real();
}

int overlap_order(int J, int m_beta) {
    return std::max(200, static_cast<int>(std::ceil(1.15 * kPi * std::abs(m_beta))) + 2 * J + 64);
}

std::vector<cplx> basis_overlap_column(const JKM& q, int l, int quadrature_order) {
    check_jkm(q);
    if (l < 0) {
        throw DomainError("negative window");
    }
    const int order = quadrature_order > 0 ? quadrature_order : overlap_order(q.J, l);
    const QuadratureRule rule = cosine_gauss_legendre(order, 0.0, kPi);
    std::vector<cplx> out(2 * l + 1, cplx(0.0));
    const double pref = std::sqrt((2.0 * q.J + 1.0) / (2.0 * kPi));
    for (std::size_t n = 0; n < rule.size(); ++n) {
        const double b = rule.nodes[n];
        const double f = rule.weights[n] * std::sqrt(std::sin(b)) * wigner_small_d(q.J, q.M, q.K, b);
        const cplx step = std::polar(1.0, -2.0 * b);
        cplx ph = std::polar(1.0, 2.0 * l * b);
        for (int i = 0; i <= 2 * l; ++i) {
            out[i] += f * ph;
            ph *= step;
        }
    }
    for (auto& v : out) {
        v *= pref;
    }
    return out;
}

cplx basis_overlap(const JKM& q, const MomentumTriple& m, int quadrature_order) {
    check_jkm(q);
    if (m.m_alpha != q.M || m.m_gamma != q.K) {
        return 0.0;
    }
    const int order = quadrature_order > 0 ? quadrature_order : overlap_order(q.J, m.m_beta);
    const QuadratureRule rule = cosine_gauss_legendre(order, 0.0, kPi);
    cplx acc = 0.0;
    for (std::size_t n = 0; n < rule.size(); ++n) {
        const double b = rule.nodes[n];
        acc += rule.weights[n] * std::sqrt(std::sin(b)) * wigner_small_d(q.J, q.M, q.K, b) *
               std::polar(1.0, -2.0 * m.m_beta * b);
    }
    return acc * std::sqrt((2.0 * q.J + 1.0) / (2.0 * kPi));
}

BasisConversion jkm_to_m_matrix(const JKMBasisSpec& from, const MBasisSpec& to, int quadrature_order) {
    BasisConversion out;
    out.matrix = CMatrix::Zero(static_cast<Eigen::Index>(to.dimension()), static_cast<Eigen::Index>(from.dimension()));
    out.leakage.assign(from.dimension(), 1.0);
    const int l = to.m_max(Axis::beta);
    for (std::size_t j = 0; j < from.dimension(); ++j) {
        const JKM& q = from.entry(j);
        if (std::abs(q.M) > to.m_max(Axis::alpha) || std::abs(q.K) > to.m_max(Axis::gamma)) {
            continue;
        }
        const auto col = basis_overlap_column(q, l, quadrature_order);
        double captured = 0.0;
        for (int mb = -l; mb <= l; ++mb) {
            const auto row = to.index({q.M, mb, q.K});
            out.matrix(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = col[mb + l];
            captured += std::norm(col[mb + l]);
        }
        out.leakage[j] = 1.0 - captured;
    }
    return out;
}

RotorState convert_to_m_basis(const RotorState& state, const MBasisSpec& to, int quadrature_order,
                              double* captured) {
    const JKMBasisSpec& from = state.jkm_basis();
    const int l = to.m_max(Axis::beta);
    if (state.is_pure()) {
        const CVector& c = state.coefficients();
        CVector out = CVector::Zero(static_cast<Eigen::Index>(to.dimension()));
        for (std::size_t j = 0; j < from.dimension(); ++j) {
            const cplx cj = c[static_cast<Eigen::Index>(j)];
            if (cj == 0.0) {
                continue;
            }
            const JKM& q = from.entry(j);
            if (std::abs(q.M) > to.m_max(Axis::alpha) || std::abs(q.K) > to.m_max(Axis::gamma)) {
                continue;
            }
            const auto col = basis_overlap_column(q, l, quadrature_order);
            for (int mb = -l; mb <= l; ++mb) {
                out[static_cast<Eigen::Index>(to.index({q.M, mb, q.K}))] += cj * col[mb + l];
            }
        }
        const double n2 = out.squaredNorm();
        if (captured) {
            *captured = n2;
        }
        return RotorState::normalized(to, std::move(out));
    }
    const BasisConversion conv = jkm_to_m_matrix(from, to, quadrature_order);
    CMatrix rho = conv.matrix * state.density() * conv.matrix.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    if (captured) {
        *captured = tr;
    }
    rho /= tr;
    return RotorState::mixed(to, std::move(rho));
}

namespace {

// Operator acting on one axis of the momentum basis, identity on the others.
OperatorMatrix axis_operator(Axis axis, const MBasisSpec& basis, const std::function<cplx(int, int)>& element,
                             bool hermitian) {
    const std::size_t n = basis.dimension();
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const MomentumTriple a = basis.triple(i);
        for (int k = -basis.m_max(axis); k <= basis.m_max(axis); ++k) {
            MomentumTriple b = a;
            b[axis] = k;
            const cplx v = element(a[axis], k);
            if (v != 0.0) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(basis.index(b))) = v;
            }
        }
    }
    return OperatorMatrix(basis, std::move(m), hermitian);
}

}  // namespace

OperatorMatrix identity_operator(const Basis& basis) {
    const auto n = static_cast<Eigen::Index>(basis_dimension(basis));
    return OperatorMatrix(basis, CMatrix::Identity(n, n), true);
}

OperatorMatrix momentum_matrix(Axis axis, const MBasisSpec& basis) {
    const double f = axis_phase_factor(axis);
    return axis_operator(axis, basis, [f](int r, int c) { return r == c ? cplx(f * r) : cplx(0.0); }, true);
}

OperatorMatrix angle_power_matrix(Axis axis, int power, const MBasisSpec& basis) {
    if (power < 0) {
        throw DomainError("negative angle power");
    }
    const double period = axis_period(axis);
    const double omega = axis_phase_factor(axis);
    auto element = [=](int row, int col) -> cplx {
        const int n = col - row;
        if (n == 0) {
            return std::pow(period, power) / (power + 1.0);
        }
        const cplx inw(0.0, n * omega);
        cplx prev = 0.0;  // I_0(n) = 0 for n != 0
        for (int p = 1; p <= power; ++p) {
            prev = std::pow(period, p - 1) / inw - static_cast<double>(p) / inw * prev;
        }
        return power == 0 ? cplx(0.0) : prev;
    };
    return axis_operator(axis, basis, element, true);
}

OperatorMatrix position_angle_matrix(Axis axis, const MBasisSpec& basis) {
    const double diag = 0.5 * axis_period(axis);
    const double f = axis_phase_factor(axis);
    auto element = [=](int row, int col) -> cplx {
        if (row == col) {
            return diag;
        }
        return cplx(0.0, 1.0 / (f * (row - col)));
    };
    return axis_operator(axis, basis, element, true);
}

OperatorMatrix cos2beta_m_matrix(const MBasisSpec& basis) {
    auto element = [](int row, int col) -> cplx {
        if (row == col) return 0.5;
        if (std::abs(row - col) == 1) return 0.25;
        return 0.0;
    };
    return axis_operator(Axis::beta, basis, element, true);
}

cplx expectation(const RotorState& state, const OperatorMatrix& op) {
    if (!(state.basis() == op.basis())) {
        throw DomainError("state and operator live on different bases");
    }
    if (state.is_pure()) {
        const CVector& c = state.coefficients();
        return c.dot(op.matrix() * c);
    }
    return (state.density() * op.matrix()).trace();
}

double fidelity(const RotorState& a, const RotorState& b) {
    if (!(a.basis() == b.basis())) {
        throw DomainError("fidelity between states on different bases");
    }
    if (a.is_pure() && b.is_pure()) {
        return std::norm(a.coefficients().dot(b.coefficients()));
    }
    return (a.density() * b.density()).trace().real();
}

}  // namespace orient
