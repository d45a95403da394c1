#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orient/rotor.hpp"

namespace orient {

/// Rotational constants in reduced units (hbar = 1): A = 1/(2 I1), C = 1/(2 I3).
struct TopConstants {
    double A = 0.5;
    double C = 0.5;

    double I1() const { return 0.5 / A; }
    double I3() const { return 0.5 / C; }
    void check() const;
};

/// Gaussian envelope with peak 1 and full width at half maximum `duration`, centred at `center_time`.
struct PulseConfig {
    double strength = 0.0;
    double duration = 1e-3;
    double center_time = 0.0;

    void check() const;
    double envelope(double t) const;
    double start() const { return center_time - 5.0 * duration; }
    double end() const { return center_time + 5.0 * duration; }
    /// strength * int g dt over the whole line.
    double area() const;
};

/// E(J, K) = A J(J+1) + (C - A) K^2 per basis entry.
std::vector<double> free_energies(const JKMBasisSpec& basis, const TopConstants& constants);

/// <j1 m1 j2 m2 | J M> by the Racah formula.
double clebsch_gordan(int j1, int m1, int j2, int m2, int J, int M);

/// <J' K M| cos^2 beta |J K M> from Clebsch-Gordan coefficients: delta/3 + (2/3) <P2>.
double cos2beta_element(int Jp, int J, int K, int M);

/// cos^2 beta on a fixed (K, M) block by Gauss-Legendre in cos beta; order <= 0 picks an exact order.
OperatorMatrix cos2beta_matrix(const JKMBasisSpec& basis, int quadrature_order = 0);

/// Exact field-free evolution: c_i -> exp(-i E_i t) c_i.
RotorState free_propagate(const RotorState& state, double t_bar, const TopConstants& constants);

struct KickReport {
    double norm_drift = 0.0;      // |norm - 1| at the end of the window
    long steps = 0;
    long rejected = 0;
    double top_shell_population = 0.0;  // population in the two highest J shells
    bool renormalized = false;          // drift above 1e-12 was reported and then divided out
    std::vector<std::string> warnings;
};

/// Integrates i d/dt psi = [H_free + g(t) strength cos^2 beta] psi from pulse.start() to `t_stop`
/// (default pulse.end()) with Dormand-Prince 5(4) in the interaction picture. Drift above 100 tol
/// raises IntegrationError; smaller drift is reported and flagged before the state is rescaled to
/// the unit norm RotorState requires.
RotorState propagate_kick(const RotorState& initial, const PulseConfig& pulse, const TopConstants& constants,
                          double tol = 1e-10, KickReport* report = nullptr, double t_stop = NAN);

/// <psi| cos^2 beta |psi> for a state on a fixed (K, M) block.
double cos2beta_expectation(const RotorState& state, const OperatorMatrix& cos2);

struct AlignmentConfig {
    TopConstants constants;
    PulseConfig pulse;
    JKM initial{3, 3, 3};
    int j_max = 40;
    std::vector<double> times;
    double tol = 1e-10;
};

struct AlignmentResult {
    std::vector<double> times;
    std::vector<double> signal;
    std::vector<RotorState> snapshots;
    std::optional<RotorState> post_kick;
    double pre_kick_signal = 0.0;
    double post_kick_signal = 0.0;
    KickReport kick;
};

/// The initial state is given at pulse.start(). Times before the pulse window use free evolution,
/// times inside it integrate to that instant, later times free-evolve the post-kick state.
AlignmentResult run_alignment(const AlignmentConfig& config);

/// Convenience: signal only.
std::vector<std::pair<double, double>> alignment_signal(const AlignmentConfig& config);

}  // namespace orient
