#pragma once

#include <vector>

#include "orient/dynamics.hpp"

namespace orient {

/// Classical phase-space point; beta is kept strictly inside (0, pi).
struct ClassicalState {
    double alpha = 0.0;
    double beta = kPi / 2;
    double gamma = 0.0;
    double p_alpha = 0.0;
    double p_beta = 0.0;
    double p_gamma = 0.0;

    EulerAngles omega() const { return {alpha, beta, gamma}; }
};

struct ClassicalDerivative {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double p_alpha = 0.0;
    double p_beta = 0.0;
    double p_gamma = 0.0;
};

inline constexpr double kPoleGuard = 1e-8;

/// (p_alpha - p_gamma cos b)^2 / (2 I1 sin^2 b) + p_beta^2 / (2 I1) + p_gamma^2 / (2 I3).
double classical_hamiltonian(const ClassicalState& s, const TopConstants& k);

/// Characteristics of the leading-order Liouville equation; throws SingularityError if sin(beta) <= 1e-8.
ClassicalDerivative classical_vector_field(const ClassicalState& s, const TopConstants& k);

struct ClassicalPath {
    std::vector<double> t;
    std::vector<ClassicalState> states;
    bool truncated = false;         // stopped at the pole guard
    double max_energy_drift = 0.0;  // relative
};

/// Adaptive Dormand-Prince integration of (alpha, beta, gamma, p_beta); p_alpha and p_gamma are
/// cyclic momenta and are copied unchanged.
ClassicalPath classical_trajectory(const ClassicalState& initial, double t_span, const TopConstants& k,
                                   double tol = 1e-12);

}  // namespace orient
