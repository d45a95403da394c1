#pragma once

#include <vector>

#include "orient/dynamics.hpp"

namespace orient {

struct CanonicalBlock {
    int m_alpha = 0;
    int m_gamma = 0;
    std::vector<double> computed;  // lowest eigenvalues of the canonical Hamiltonian on this block
    std::vector<double> exact;     // A J(J+1) + (C - A) m_gamma^2, J >= max(|m_alpha|, |m_gamma|)
    double max_error = 0.0;
};

struct CanonicalReport {
    int m_max = 0;
    int n_levels = 0;
    std::vector<double> computed;          // lowest n_levels of the whole window, sorted
    std::vector<double> exact;
    double discrepancy = 0.0;              // max |computed - exact| over the lowest levels
    std::vector<double> computed_without_potential;
    double discrepancy_without_potential = 0.0;
    double potential_offset = 0.0;         // mean shift of the lowest levels when the quantum potential is dropped
    std::vector<CanonicalBlock> blocks;
};

/// Builds (p_alpha - p_gamma cos b)^2/(2 I1 sin^2 b) + p_beta^2/(2 I1) + p_gamma^2/(2 I3)
///        - (1 + sin^-2 b)/(8 I1)
/// block by block on the momentum window (beta on the 2 m_max + 1 point grid dual to the window)
/// and compares its low spectrum with the symmetric-top energies.
CanonicalReport canonical_hamiltonian_check(int m_max, const TopConstants& constants, int n_levels = 5);

}  // namespace orient
