#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "orient/rotor.hpp"

namespace orient {

/// Uniform samples theta_j = period * j / n on each axis.
struct AngleGrid {
    int n_alpha = 1;
    int n_beta = 1;
    int n_gamma = 1;

    int count(Axis a) const;
    double point(Axis a, int j) const { return axis_period(a) * j / count(a); }
    std::size_t size() const { return static_cast<std::size_t>(n_alpha) * n_beta * n_gamma; }
    std::size_t index(int ia, int ib, int ig) const { return (static_cast<std::size_t>(ia) * n_beta + ib) * n_gamma + ig; }
    std::array<int, 3> split(std::size_t i) const;
    EulerAngles at(std::size_t i) const;
    bool operator==(const AngleGrid&) const = default;
};

/// Inclusive integer ranges per axis; alpha is the slowest index.
struct MomentumWindow {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};

    static MomentumWindow symmetric(int a, int b, int g);
    static MomentumWindow covering(const MBasisSpec& basis) {
        return symmetric(basis.m_max(Axis::alpha), basis.m_max(Axis::beta), basis.m_max(Axis::gamma));
    }
    int count(Axis a) const { return hi[axis_index(a)] - lo[axis_index(a)] + 1; }
    std::size_t size() const;
    MomentumTriple at(std::size_t i) const;
    std::optional<std::size_t> find(const MomentumTriple& m) const;
    bool operator==(const MomentumWindow&) const = default;
};

struct GridSpec {
    AngleGrid angles;
    MomentumWindow momenta;
    bool operator==(const GridSpec&) const = default;
};

struct GridDiagnostics {
    std::string source;           // descriptor of the producing state or operator
    std::string method;           // "momentum" (double sum) or "angle" (quadrature)
    double max_imag_residue = 0.0;
    double captured_norm = 1.0;   // norm of the state inside its truncation window
    int beta_order = 0;           // beta' quadrature order per piece, 0 if closed form
    int alpha_order = 0;
    int gamma_order = 0;
    std::vector<std::string> warnings;
};

/// W(Omega, m) samples; values stored momentum-major: values[m * n_angles + angle].
class PhaseSpaceGrid {
public:
    PhaseSpaceGrid() = default;
    explicit PhaseSpaceGrid(GridSpec spec);

    const GridSpec& spec() const { return spec_; }
    std::size_t n_angles() const { return spec_.angles.size(); }
    std::size_t n_momenta() const { return spec_.momenta.size(); }
    double at(std::size_t angle, std::size_t momentum) const { return values_[momentum * n_angles() + angle]; }
    double& at(std::size_t angle, std::size_t momentum) { return values_[momentum * n_angles() + angle]; }
    /// Value at a grid angle index and an arbitrary (real) momentum, rounded half-up.
    double at_momentum(std::size_t angle, double m_alpha, double m_beta, double m_gamma) const;
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    GridDiagnostics diagnostics;

private:
    GridSpec spec_;
    std::vector<double> values_;
};

struct DisplacementSpec {
    EulerAngles omega;
    MomentumTriple m;
};

OperatorMatrix displacement_matrix(const DisplacementSpec& spec, const MBasisSpec& basis);
/// Number of basis columns that the momentum shift pushes outside the window.
std::size_t displacement_leakage(const DisplacementSpec& spec, const MBasisSpec& basis);

/// Single-axis origin kernel <m1|Delta(0,0)|m0> = sinc((m0 + m1) pi / 2) on the window of `axis`.
OperatorMatrix kernel_origin(Axis axis, const MBasisSpec& basis);
/// Tensor product of the three single-axis origin kernels.
OperatorMatrix kernel_origin(const MBasisSpec& basis);

/// Displaced kernel, closed form <c|Delta|d> = prod exp(-i phi (c - d) theta) sinc((k - (c + d)/2) pi).
OperatorMatrix kernel(const EulerAngles& omega, const MomentumTriple& m, const MBasisSpec& basis);
/// D Delta(0,0) D^dagger with truncated matrices; equals `kernel` away from the window edge.
OperatorMatrix kernel_by_conjugation(const EulerAngles& omega, const MomentumTriple& m, const MBasisSpec& basis);

/// sinc((k - s/2) pi) for integers k, s using the parity split.
double half_sinc(int k, int s);

/// tr[A Delta(Omega, m)].
cplx weyl_symbol(const OperatorMatrix& op, const EulerAngles& omega, const MomentumTriple& m);

enum class KernelBackend { parallel, serial_reference };

PhaseSpaceGrid weyl_symbol_grid(const OperatorMatrix& op, const GridSpec& spec,
                                KernelBackend backend = KernelBackend::parallel);

/// Symbol samples of an analytically known phase-space function.
PhaseSpaceGrid symbol_grid_from_function(const GridSpec& spec,
                                         const std::function<double(const EulerAngles&, const MomentumTriple&)>& f);

/// Momentum-representation double sum.
PhaseSpaceGrid wigner_from_m_basis(const RotorState& state, const GridSpec& spec,
                                   KernelBackend backend = KernelBackend::parallel);

struct AngleQuadrature {
    int order = 200;           // minimum order per integration piece
    static constexpr int kMinimumOrder = 16;
};

/// Orientation-representation integral by quadrature.
PhaseSpaceGrid wigner_from_angle_basis(const RotorState& state, const GridSpec& spec, AngleQuadrature quad = {});

/// Exact inversion of the symbol map by angle Fourier analysis and a per-axis least-squares sinc solve.
OperatorMatrix inverse_weyl(const PhaseSpaceGrid& grid, const MBasisSpec& basis);
/// Literal (1/4pi^3) sum_m int dOmega W Delta on the grid window (trapezoid in angles).
OperatorMatrix inverse_weyl_reference(const PhaseSpaceGrid& grid, const MBasisSpec& basis);

struct Marginals {
    std::vector<double> angle;          // per angle point, sum over momenta
    std::vector<double> momentum;       // per momentum index, integral over angles
    std::vector<double> angle_raw;      // plain window sums
    double angle_uncertainty = 0.0;     // max extrapolation spread
    std::size_t extrapolated_points = 0;
    double min_angle = 0.0;
    double min_momentum = 0.0;
};

/// Angle marginal uses extrapolated momentum sums when `extrapolate` is set.
Marginals marginals(const PhaseSpaceGrid& grid, bool extrapolate = true);

/// Trapezoid angle volume element for the grid (dalpha dbeta dgamma, no sin beta).
double angle_cell(const AngleGrid& g);

/// sum_m int dOmega W.
double normalization(const PhaseSpaceGrid& grid);

/// int dOmega sum_m W_A W, with extrapolated momentum sums.
double phase_space_expectation(const PhaseSpaceGrid& state_grid, const PhaseSpaceGrid& symbol_grid,
                               bool extrapolate = true);

/// Nested extrapolated sum over a 3D momentum window of per-momentum values.
double momentum_sum(const MomentumWindow& window, const std::vector<double>& per_momentum, bool extrapolate,
                    double* uncertainty = nullptr);

/// 2^{-m} sum_k C(m,k) p^{m-k} angle^n p^k with angle^n by the Fourier recipe.
OperatorMatrix weyl_ordered_product(int n, int m, Axis axis, const MBasisSpec& basis);

}  // namespace orient
