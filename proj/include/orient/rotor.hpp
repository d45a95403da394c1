#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace orient {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

enum class Axis { alpha = 0, beta = 1, gamma = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::alpha, Axis::beta, Axis::gamma};

inline int axis_index(Axis a) { return static_cast<int>(a); }
/// Period of the angle: 2 pi for alpha and gamma, pi for beta.
inline double axis_period(Axis a) { return a == Axis::beta ? kPi : 2.0 * kPi; }
/// Ratio between physical momentum and the integer label (2 for beta).
inline int axis_phase_factor(Axis a) { return a == Axis::beta ? 2 : 1; }
const char* axis_name(Axis a);
Axis parse_axis(const std::string& name);

/// Orientation in the z-y-z convention, canonicalized into [0,2pi) x [0,pi) x [0,2pi).
class EulerAngles {
public:
    EulerAngles() = default;
    EulerAngles(double alpha, double beta, double gamma);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double gamma() const { return gamma_; }
    double operator[](Axis a) const;

    EulerAngles translated(const EulerAngles& by) const;
    EulerAngles translated_back(const EulerAngles& by) const;

    bool operator==(const EulerAngles&) const = default;

private:
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double gamma_ = 0.0;
};

/// Wraps x into [0, period).
double wrap_angle(double x, double period);

struct MomentumTriple {
    int m_alpha = 0;
    int m_beta = 0;
    int m_gamma = 0;

    int operator[](Axis a) const;
    int& operator[](Axis a);

    double p_alpha() const { return m_alpha; }
    double p_beta() const { return 2.0 * m_beta; }
    double p_gamma() const { return m_gamma; }

    /// Nearest-integer rounding, halves rounded up.
    static MomentumTriple rounded(double m_alpha, double m_beta, double m_gamma);

    MomentumTriple operator+(const MomentumTriple& o) const;
    MomentumTriple operator-(const MomentumTriple& o) const;
    bool operator==(const MomentumTriple&) const = default;
};

/// Symmetric momentum window |m_axis| <= m_max_axis; alpha is the slowest index.
class MBasisSpec {
public:
    MBasisSpec() = default;
    MBasisSpec(int m_max_alpha, int m_max_beta, int m_max_gamma);

    int m_max(Axis a) const { return m_max_[axis_index(a)]; }
    int width(Axis a) const { return 2 * m_max(a) + 1; }
    std::size_t dimension() const;

    bool contains(const MomentumTriple& m) const;
    std::size_t index(const MomentumTriple& m) const;
    std::optional<std::size_t> find(const MomentumTriple& m) const;
    MomentumTriple triple(std::size_t index) const;

    bool operator==(const MBasisSpec&) const = default;

private:
    std::array<int, 3> m_max_{0, 0, 0};
};

struct JKM {
    int J = 0;
    int K = 0;
    int M = 0;
    bool operator==(const JKM&) const = default;
};

void check_jkm(const JKM& q);

/// Symmetric-top basis J <= j_max, optionally restricted to one (K, M) block.
class JKMBasisSpec {
public:
    JKMBasisSpec() : JKMBasisSpec(0) {}
    explicit JKMBasisSpec(int j_max, std::optional<std::pair<int, int>> fixed_km = std::nullopt);

    int j_max() const { return j_max_; }
    const std::optional<std::pair<int, int>>& fixed_km() const { return fixed_km_; }
    std::size_t dimension() const { return entries_.size(); }
    const JKM& entry(std::size_t i) const { return entries_.at(i); }
    const std::vector<JKM>& entries() const { return entries_; }
    std::optional<std::size_t> find(const JKM& q) const;
    std::size_t index(const JKM& q) const;

    bool operator==(const JKMBasisSpec& o) const { return j_max_ == o.j_max_ && fixed_km_ == o.fixed_km_; }

private:
    int j_max_ = 0;
    std::optional<std::pair<int, int>> fixed_km_;
    std::vector<JKM> entries_;
};

using Basis = std::variant<MBasisSpec, JKMBasisSpec>;

std::size_t basis_dimension(const Basis& b);
bool is_m_basis(const Basis& b);
std::string describe_basis(const Basis& b);

class RotorState {
public:
    /// Pure state; throws DomainError unless the norm is 1 within 1e-12.
    static RotorState pure(Basis basis, CVector coefficients);
    /// Pure state rescaled to unit norm; throws DomainError for a zero vector.
    static RotorState normalized(Basis basis, CVector coefficients);
    /// Density matrix; checks hermiticity, unit trace and positivity.
    static RotorState mixed(Basis basis, CMatrix density);

    const Basis& basis() const { return basis_; }
    bool is_pure() const { return std::holds_alternative<CVector>(payload_); }
    const CVector& coefficients() const;
    CMatrix density() const;
    std::size_t dimension() const { return basis_dimension(basis_); }
    const MBasisSpec& m_basis() const;
    const JKMBasisSpec& jkm_basis() const;

private:
    RotorState(Basis b, std::variant<CVector, CMatrix> p) : basis_(std::move(b)), payload_(std::move(p)) {}
    Basis basis_;
    std::variant<CVector, CMatrix> payload_;
};

class OperatorMatrix {
public:
    OperatorMatrix(Basis basis, CMatrix matrix, bool hermitian = false);

    const Basis& basis() const { return basis_; }
    const CMatrix& matrix() const { return matrix_; }
    bool hermitian() const { return hermitian_; }
    /// max |A - A^dagger| entry.
    double hermiticity_residual() const;
    /// Throws DomainError if flagged Hermitian but the residual exceeds 1e-10.
    void check() const;

private:
    Basis basis_;
    CMatrix matrix_;
    bool hermitian_;
};

/// D^J_{MK}(alpha, beta, gamma) = exp(-i M alpha) d^J_{MK}(beta) exp(-i K gamma).
cplx wigner_D(int J, int M, int K, const EulerAngles& omega);

/// <Omega|JKM> = sqrt((2J+1)/8pi^2) conj(D^J_{MK}(Omega)).
cplx jkm_wavefunction(const JKM& q, const EulerAngles& omega);
/// <Omega|m>; throws PoleError at beta = 0.
cplx m_wavefunction(const MomentumTriple& m, const EulerAngles& omega);

cplx angle_wavefunction(const RotorState& state, const EulerAngles& omega);

/// sin(beta) <Omega|rho|Omega>, finite at the poles for either basis.
double angle_density(const RotorState& state, const EulerAngles& omega);

/// Quadrature order needed to resolve the overlap integrand for given J and m_beta.
int overlap_order(int J, int m_beta);

/// <m|JKM>; order <= 0 selects overlap_order.
cplx basis_overlap(const JKM& q, const MomentumTriple& m, int quadrature_order = 0);

/// <m|JKM> for m = (M, m_beta, K), m_beta = -l..l.
std::vector<cplx> basis_overlap_column(const JKM& q, int l, int quadrature_order = 0);

struct BasisConversion {
    CMatrix matrix;                   // rows: m-basis, columns: jkm-basis
    std::vector<double> leakage;      // 1 - captured norm per jkm column
};

BasisConversion jkm_to_m_matrix(const JKMBasisSpec& from, const MBasisSpec& to, int quadrature_order = 0);

/// Re-expresses a jkm state in a momentum window and renormalizes it; the norm captured by
/// the window before renormalization is returned in `captured`.
RotorState convert_to_m_basis(const RotorState& state, const MBasisSpec& to, int quadrature_order = 0,
                              double* captured = nullptr);

OperatorMatrix identity_operator(const Basis& basis);
/// Physical momentum operator (m for alpha/gamma, 2 m for beta), diagonal.
OperatorMatrix momentum_matrix(Axis axis, const MBasisSpec& basis);
/// Multiplication by the angle on its period, Fourier matrix elements.
OperatorMatrix position_angle_matrix(Axis axis, const MBasisSpec& basis);
/// Multiplication by angle^power by the same Fourier recipe.
OperatorMatrix angle_power_matrix(Axis axis, int power, const MBasisSpec& basis);
/// Multiplication by cos^2(beta) in the momentum basis.
OperatorMatrix cos2beta_m_matrix(const MBasisSpec& basis);

cplx expectation(const RotorState& state, const OperatorMatrix& op);
/// |<a|b>|^2 for pure states, tr(rho_a rho_b) otherwise.
double fidelity(const RotorState& a, const RotorState& b);

}  // namespace orient
