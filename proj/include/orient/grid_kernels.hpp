#pragma once

#include <vector>

#include "orient/phase_space.hpp"

namespace orient::kernels {

/// out[m * n_angles + angle] = prefactor * Re sum_{a,b} A_ab prod_i exp(i phi_i (a_i - b_i) theta_i)
///                                        * sinc((k_i - (a_i + b_i)/2) pi).
/// Returns the largest discarded imaginary part.

/// Factorized evaluation, OpenMP-parallel over angle points.
double evaluate_factorized(const MBasisSpec& basis, const CMatrix& A, double prefactor, const GridSpec& spec,
                           std::vector<double>& out);

/// Literal double sum with naive sin(x)/x, serial.
double evaluate_reference(const MBasisSpec& basis, const CMatrix& A, double prefactor, const GridSpec& spec,
                          std::vector<double>& out);

}  // namespace orient::kernels
